"""Time-lock commitment between a human and a device (e.g. a smart fridge).

The human deploys the agreement with a deposit and a forbidden window of block
heights.  The window is inclusive at both ends and repeats every ``period``
blocks when ``period > 0``; a window whose start exceeds its end wraps past
the period boundary, like a night-time window.  The device reports each access
attempt.  Attempts inside the window are denied and cost the human the
penalty, paid from the deposit to the beneficiary.  Once ``duration`` blocks
have passed, the agreement lapses.  After that every attempt is allowed and
the rest of the deposit goes back to the human.
"""

from __future__ import annotations

from ..engine import Contract, as_address, as_amount, contract_method
from ..errors import BadArguments, ConstructorError, StateError, WrongAmount


def in_window(height: int, start: int, end: int, period: int) -> bool:
    if period:
        height %= period
        if start > end:
            return height >= start or height <= end
    return start <= height <= end


class TimeLockCommitment(Contract):
    kind = "time_lock_commitment"
    payable_constructor = True

    def __init__(self, ctx, device, locked_resource, window, penalty, duration, period=0,
                 beneficiary=None):
        self.human = ctx.sender
        self.device = as_address(device, "device", ConstructorError)
        if self.device == self.human:
            raise ConstructorError("device must differ from the human")
        if not isinstance(locked_resource, str) or not locked_resource:
            raise ConstructorError("locked_resource must be a non-empty string")
        if (not isinstance(window, list) or len(window) != 2
                or not all(type(w) is int and w >= 0 for w in window)):
            raise ConstructorError("window must be [start_height, end_height]")
        self.period = as_amount(period, "period", ConstructorError)
        start, end = window
        if self.period and not (start < self.period and end < self.period):
            raise ConstructorError("a recurring window must lie within one period")
        if not self.period and start > end:
            raise ConstructorError("window start must not exceed its end")
        self.window = (start, end)
        self.penalty = as_amount(penalty, "penalty", ConstructorError, positive=True)
        if ctx.amount < self.penalty:
            raise WrongAmount(f"deposit at least the penalty {self.penalty}, got {ctx.amount}")
        self.beneficiary = (as_address(beneficiary, "beneficiary", ConstructorError)
                            if beneficiary is not None else self.device)
        self.expires_at = ctx.height + as_amount(duration, "duration", ConstructorError,
                                                 positive=True)
        self.locked_resource = locked_resource
        self.deposit = ctx.amount
        self.violations = 0
        self.phase = "Active"
        ctx.emit("CommitmentCreated", human=self.human, device=self.device,
                 resource=locked_resource, window=list(self.window), period=self.period,
                 penalty=self.penalty, expires_at=self.expires_at)

    def state_json(self):
        return {
            "human": self.human,
            "device": self.device,
            "locked_resource": self.locked_resource,
            "forbidden_window": list(self.window),
            "period": self.period,
            "penalty": self.penalty,
            "beneficiary": self.beneficiary,
            "deposit": self.deposit,
            "violations": self.violations,
            "expires_at": self.expires_at,
            "phase": self.phase,
        }

    def _lapse(self, ctx):
        self.phase = "Expired"
        refund, self.deposit = self.deposit, 0
        ctx.pay(self.human, refund)
        ctx.emit("CommitmentExpired", human=self.human, refund=refund)

    @contract_method
    def request_access(self, ctx, height=None):
        ctx.only(self.device)
        if height is not None and height != ctx.height:
            raise BadArguments(f"access reported for height {height} in block {ctx.height}")
        if self.phase == "Active" and ctx.height > self.expires_at:
            self._lapse(ctx)
        if self.phase == "Expired" or not in_window(ctx.height, *self.window, self.period):
            ctx.emit("AccessGranted", resource=self.locked_resource, height=ctx.height)
            return "allow"
        fine = min(self.penalty, self.deposit)
        self.deposit -= fine
        self.violations += 1
        ctx.pay(self.beneficiary, fine)
        ctx.emit("AccessDenied", resource=self.locked_resource, height=ctx.height,
                 penalty=fine, beneficiary=self.beneficiary)
        return "deny"

    @contract_method(payable=True)
    def top_up(self, ctx):
        ctx.only(self.human)
        if self.phase != "Active" or ctx.height > self.expires_at:
            raise StateError("the agreement has expired")
        self.deposit += ctx.amount
        ctx.emit("DepositAdded", amount=ctx.amount, deposit=self.deposit)

    @contract_method
    def expire(self, ctx):
        if self.phase != "Active":
            raise StateError("the agreement has already expired")
        if ctx.height <= self.expires_at:
            raise StateError(f"the agreement runs until height {self.expires_at}")
        self._lapse(ctx)
