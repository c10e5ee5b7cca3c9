"""Fractionally owned autonomous taxi with owner governance.

The method and event names follow the vehicle-ownership interface: owners,
``set_owners``, ``approve_transfer`` and ``request_ride``, plus the ``RideReq``,
``Transf`` and ``Appr`` events.  Ride fares are held until the vehicle reports
completion.  They are then split among the owners in equal shares (the
indivisible remainder goes to the first owner), after the maintenance share
has been sent to the vehicle's own wallet.

Ballots let owners change ``service_fee`` (the fare) or
``maintenance_fund_rate`` (percent of each fare kept for maintenance).  A
ballot passes only on a strict majority of the owners at proposal time.
"""

from __future__ import annotations

from ..engine import CallContext, Contract, as_address, as_amount, contract_method
from ..errors import (
    BadArguments,
    ConstructorError,
    ContractUnauthorized,
    DoubleVote,
    StateError,
    WrongAmount,
)

PARAMS = ("service_fee", "maintenance_fund_rate")


def split_evenly(total: int, n: int) -> list[int]:
    """Equal shares of ``total``; the remainder goes to the first share."""
    base, rest = divmod(total, n)
    return [base + rest] + [base] * (n - 1)


def ballot_passes(yes: int, n_owners: int) -> bool:
    return yes > n_owners // 2


def _check_param(name, value, error=BadArguments):
    if name not in PARAMS:
        raise error(f"unknown parameter {name!r}; expected one of {PARAMS}")
    if name == "service_fee":
        as_amount(value, name, error, positive=True)
    elif type(value) is not int or not 0 <= value <= 100:
        raise error("maintenance_fund_rate must be an integer percentage 0..100")
    return value


def _owner_list(owners, error):
    if not isinstance(owners, list) or not owners:
        raise error("owners must be a non-empty list of addresses")
    out = [as_address(o, "owner", error) for o in owners]
    if len(set(out)) != len(out):
        raise error("owners must be distinct")
    return out


class RideSharingContract(Contract):
    kind = "ride_sharing"

    def __init__(self, ctx: CallContext, vehicle, vin, owners, service_fee,
                 maintenance_fund_rate=0, ride_timeout=50):
        self.vehicle = as_address(vehicle, "vehicle", ConstructorError)
        if not isinstance(vin, str) or len(vin) != 64 or any(c not in "0123456789abcdef" for c in vin):
            raise ConstructorError("vin must be 32 bytes as 64 lowercase hex digits")
        self.vin = vin
        self.owners = _owner_list(owners, ConstructorError)
        self.params = {
            "service_fee": _check_param("service_fee", service_fee, ConstructorError),
            "maintenance_fund_rate": _check_param("maintenance_fund_rate", maintenance_fund_rate,
                                                  ConstructorError),
        }
        self.ride_timeout = as_amount(ride_timeout, "ride_timeout", ConstructorError, positive=True)
        self.passenger = None
        self.fare = 0
        self.ride_started_at = None
        self.pending_transfer = None
        self.rides_completed = 0
        self.ballots: list[dict] = []

    @property
    def ride_cost(self) -> int:
        return self.params["service_fee"]

    def state_json(self):
        return {
            "vehicle": self.vehicle,
            "vin": self.vin,
            "owners": list(self.owners),
            "passenger": self.passenger,
            "ride_cost": self.ride_cost,
            "fare_held": self.fare,
            "ride_started_at": self.ride_started_at,
            "ride_timeout": self.ride_timeout,
            "pending_transfer": list(self.pending_transfer) if self.pending_transfer else None,
            "params": dict(self.params),
            "rides_completed": self.rides_completed,
            "ballots": [dict(b, votes=dict(b["votes"])) for b in self.ballots],
        }

    def _only_owner(self, ctx):
        if ctx.sender not in self.owners:
            raise ContractUnauthorized(f"{ctx.sender} is not an owner")

    # -- ownership -------------------------------------------------------------

    @contract_method
    def set_owners(self, ctx, owners):
        self._only_owner(ctx)
        self.owners = _owner_list(owners, BadArguments)
        self.pending_transfer = None
        ctx.emit("OwnersSet", owners=list(self.owners))

    @contract_method
    def approve_transfer(self, ctx, to):
        self._only_owner(ctx)
        to = as_address(to, "to")
        if to in self.owners:
            raise StateError(f"{to} is already an owner")
        self.pending_transfer = (ctx.sender, to)
        ctx.emit("Appr", _owner=ctx.sender, _approved=to)

    @contract_method
    def accept_transfer(self, ctx):
        if self.pending_transfer is None or ctx.sender != self.pending_transfer[1]:
            raise ContractUnauthorized("no transfer approved to this address")
        old, new = self.pending_transfer
        if old not in self.owners:
            raise StateError(f"{old} is no longer an owner")
        self.owners[self.owners.index(old)] = new
        self.pending_transfer = None
        ctx.emit("Transf", _from=old, _to=new)

    @contract_method
    def owners_list(self, ctx):
        return list(self.owners)

    @contract_method
    def get_vin(self, ctx):
        return self.vin

    # -- rides -----------------------------------------------------------------

    @contract_method(payable=True)
    def request_ride(self, ctx):
        if self.passenger is not None:
            raise StateError("a ride is already in progress")
        if ctx.amount != self.ride_cost:
            raise WrongAmount(f"ride costs {self.ride_cost}, got {ctx.amount}")
        self.passenger = ctx.sender
        self.fare = ctx.amount
        self.ride_started_at = ctx.height
        ctx.emit("RideReq", _passengerAddr=ctx.sender, rideCost=ctx.amount)

    @contract_method
    def complete_ride(self, ctx):
        ctx.only(self.vehicle)
        if self.passenger is None:
            raise StateError("no ride in progress")
        maintenance = self.fare * self.params["maintenance_fund_rate"] // 100
        shares = split_evenly(self.fare - maintenance, len(self.owners))
        ctx.pay(self.vehicle, maintenance)
        for owner, share in zip(self.owners, shares):
            ctx.pay(owner, share)
        ctx.emit("RideCompleted", passenger=self.passenger, fare=self.fare,
                 maintenance=maintenance, shares=shares)
        self.passenger, self.fare, self.ride_started_at = None, 0, None
        self.rides_completed += 1

    @contract_method
    def cancel_ride(self, ctx):
        """Refund the fare: by the vehicle at any time, by the passenger after the timeout."""
        if self.passenger is None:
            raise StateError("no ride in progress")
        if ctx.sender == self.passenger:
            if ctx.height <= self.ride_started_at + self.ride_timeout:
                raise StateError("ride has not timed out yet")
        elif ctx.sender != self.vehicle:
            raise ContractUnauthorized("only the passenger or the vehicle may cancel")
        ctx.pay(self.passenger, self.fare)
        ctx.emit("RideCancelled", passenger=self.passenger, refund=self.fare)
        self.passenger, self.fare, self.ride_started_at = None, 0, None

    # -- governance ------------------------------------------------------------

    def _ballot(self, ballot):
        if type(ballot) is not int or not 0 <= ballot < len(self.ballots):
            raise BadArguments(f"no ballot {ballot!r}")
        return self.ballots[ballot]

    @contract_method
    def propose(self, ctx, param, value, deadline):
        self._only_owner(ctx)
        _check_param(param, value)
        if type(deadline) is not int or deadline < ctx.height:
            raise BadArguments("deadline must be a block height not in the past")
        ballot = {
            "id": len(self.ballots),
            "proposer": ctx.sender,
            "param": param,
            "value": value,
            "deadline": deadline,
            "voters": list(self.owners),
            "votes": {},
            "closed": False,
            "executed": False,
        }
        self.ballots.append(ballot)
        ctx.emit("BallotProposed", ballot=ballot["id"], proposer=ctx.sender, param=param, value=value,
                 deadline=deadline)
        return ballot["id"]

    @contract_method
    def vote(self, ctx, ballot, yes):
        b = self._ballot(ballot)
        if ctx.sender not in b["voters"]:
            raise ContractUnauthorized(f"{ctx.sender} may not vote on ballot {ballot}")
        if b["closed"]:
            raise StateError(f"ballot {ballot} is closed")
        if ctx.height > b["deadline"]:
            raise StateError(f"ballot {ballot} voting ended at height {b['deadline']}")
        if ctx.sender in b["votes"]:
            raise DoubleVote(f"{ctx.sender} already voted on ballot {ballot}")
        if not isinstance(yes, bool):
            raise BadArguments("yes must be a boolean")
        b["votes"][ctx.sender] = yes
        ctx.emit("Voted", ballot=ballot, voter=ctx.sender, yes=yes)

    @contract_method
    def execute(self, ctx, ballot):
        b = self._ballot(ballot)
        if b["closed"]:
            raise StateError(f"ballot {ballot} already executed")
        n = len(b["voters"])
        yes = sum(1 for v in b["votes"].values() if v)
        undecided = n - len(b["votes"])
        decided = ballot_passes(yes, n) or not ballot_passes(yes + undecided, n)
        if ctx.height <= b["deadline"] and not decided:
            raise StateError(f"ballot {ballot} is still open")
        passed = ballot_passes(yes, n)
        b["closed"] = True
        b["executed"] = passed
        if passed:
            self.params[b["param"]] = b["value"]
        ctx.emit("BallotExecuted", ballot=ballot, passed=passed, yes=yes, voters=n)
        return passed

