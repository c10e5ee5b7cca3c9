"""Buyer/seller escrow with a third-party agent who resolves disputes.

Created -> Funded -> Delivered -> Released is the undisputed path.  Either party
can dispute before ``dispute_deadline``; the agent then directs a refund or a
payment.  Timeouts keep funds recoverable when someone stops responding:

* Funded past the deadline (never delivered): buyer refunded.
* Delivered past the deadline (never released or disputed): seller paid.
* Disputed past deadline + ``arbitration_window`` (agent silent): buyer refunded.
"""

from __future__ import annotations

from ..engine import Contract, as_address, as_amount, contract_method
from ..errors import BadArguments, ConstructorError, StateError, WrongAmount

TERMINAL = ("Released", "ResolvedRefund", "ResolvedPay")


class ArbitratedEscrow(Contract):
    kind = "arbitrated_escrow"

    def __init__(self, ctx, buyer, seller, agent, price, dispute_deadline, arbitration_window=10):
        self.buyer = as_address(buyer, "buyer", ConstructorError)
        self.seller = as_address(seller, "seller", ConstructorError)
        self.agent = as_address(agent, "agent", ConstructorError)
        if self.buyer == self.seller:
            raise ConstructorError("buyer and seller must differ")
        if self.agent in (self.buyer, self.seller):
            raise ConstructorError("the escrow agent must be a third party")
        self.price = as_amount(price, "price", ConstructorError, positive=True)
        if type(dispute_deadline) is not int or dispute_deadline < ctx.height:
            raise ConstructorError("dispute_deadline must be a block height not in the past")
        self.dispute_deadline = dispute_deadline
        self.arbitration_window = as_amount(arbitration_window, "arbitration_window",
                                            ConstructorError, positive=True)
        self.phase = "Created"

    def state_json(self):
        return {
            "buyer": self.buyer,
            "seller": self.seller,
            "agent": self.agent,
            "price": self.price,
            "phase": self.phase,
            "dispute_deadline": self.dispute_deadline,
            "arbitration_window": self.arbitration_window,
        }

    def _in(self, *phases):
        if self.phase not in phases:
            raise StateError(f"escrow is {self.phase}, expected {' or '.join(phases)}")

    def _refund(self, ctx, phase):
        self.phase = phase
        ctx.pay(self.buyer, self.price)
        ctx.emit("Refunded", buyer=self.buyer, amount=self.price)

    def _pay(self, ctx, phase):
        self.phase = phase
        ctx.pay(self.seller, self.price)
        ctx.emit("Released", seller=self.seller, amount=self.price)

    @contract_method(payable=True)
    def fund(self, ctx):
        ctx.only(self.buyer)
        self._in("Created")
        if ctx.amount != self.price:
            raise WrongAmount(f"price is {self.price}, got {ctx.amount}")
        self.phase = "Funded"
        ctx.emit("Funded", buyer=self.buyer, amount=ctx.amount)

    @contract_method
    def mark_delivered(self, ctx):
        ctx.only(self.seller)
        self._in("Funded")
        self.phase = "Delivered"
        ctx.emit("Delivered", seller=self.seller)

    @contract_method
    def release(self, ctx):
        ctx.only(self.buyer)
        self._in("Funded", "Delivered")
        self._pay(ctx, "Released")

    @contract_method
    def dispute(self, ctx):
        ctx.only(self.buyer, self.seller)
        self._in("Funded", "Delivered")
        if ctx.height > self.dispute_deadline:
            raise StateError(f"disputes closed at height {self.dispute_deadline}")
        self.phase = "Disputed"
        ctx.emit("Disputed", by=ctx.sender)

    @contract_method
    def arbitrate(self, ctx, decision):
        ctx.only(self.agent)
        self._in("Disputed")
        ctx.emit("Arbitrated", agent=self.agent, decision=decision)
        if decision == "refund":
            self._refund(ctx, "ResolvedRefund")
        elif decision == "pay":
            self._pay(ctx, "ResolvedPay")
        else:
            raise BadArguments("decision must be 'refund' or 'pay'")

    @contract_method
    def timeout(self, ctx):
        self._in("Funded", "Delivered", "Disputed")
        limit = self.dispute_deadline
        if self.phase == "Disputed":
            limit += self.arbitration_window
        if ctx.height <= limit:
            raise StateError(f"no timeout before height {limit + 1}")
        if self.phase == "Delivered":
            self._pay(ctx, "Released")
        else:
            self._refund(ctx, "ResolvedRefund")
