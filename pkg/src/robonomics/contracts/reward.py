"""Unilateral reward: an offeror escrows a reward for whoever completes a task.

The offeror posts the task, a deadline height and the reward at deployment
(the attached amount must equal the reward).  Anyone may claim before the
deadline; the offeror confirms and pays, or rejects the claim.  After the
deadline an unpaid reward can be returned to the offeror.

Phases: Open -> Claimed -> Paid, or Open/Claimed -> Expired.
"""

from __future__ import annotations

from ..engine import Contract, as_amount, contract_method
from ..errors import ConstructorError, ContractUnauthorized, Expired, StateError, WrongAmount

TERMINAL = ("Paid", "Expired")


class UnilateralReward(Contract):
    kind = "unilateral_reward"
    payable_constructor = True

    def __init__(self, ctx, task, deadline, reward):
        if not isinstance(task, str) or not task:
            raise ConstructorError("task must be a non-empty description")
        self.reward = as_amount(reward, "reward", ConstructorError, positive=True)
        if ctx.amount != self.reward:
            raise WrongAmount(f"attach exactly the reward {self.reward}, got {ctx.amount}")
        if type(deadline) is not int or deadline < ctx.height:
            raise ConstructorError("deadline must be a block height not in the past")
        self.offeror = ctx.sender
        self.task = task
        self.deadline = deadline
        self.claimant = None
        self.evidence = None
        self.phase = "Open"
        ctx.emit("RewardPosted", offeror=self.offeror, task=task, deadline=deadline, reward=self.reward)

    def state_json(self):
        return {
            "offeror": self.offeror,
            "task": self.task,
            "deadline": self.deadline,
            "reward": self.reward,
            "claimant": self.claimant,
            "evidence": self.evidence,
            "phase": self.phase,
        }

    @contract_method
    def claim(self, ctx, evidence=""):
        if self.phase != "Open":
            raise StateError(f"reward is {self.phase}")
        if ctx.height > self.deadline:
            raise Expired(f"deadline {self.deadline} has passed")
        if ctx.sender == self.offeror:
            raise ContractUnauthorized("the offeror cannot claim its own reward")
        self.claimant = ctx.sender
        self.evidence = str(evidence)
        self.phase = "Claimed"
        ctx.emit("Claimed", claimant=ctx.sender, evidence=self.evidence)

    @contract_method
    def reject_claim(self, ctx):
        ctx.only(self.offeror)
        if self.phase != "Claimed":
            raise StateError(f"reward is {self.phase}")
        ctx.emit("ClaimRejected", claimant=self.claimant)
        self.claimant, self.evidence = None, None
        self.phase = "Open"

    @contract_method
    def confirm_and_pay(self, ctx):
        ctx.only(self.offeror)
        if self.phase != "Claimed":
            raise StateError(f"reward is {self.phase}")
        self.phase = "Paid"
        ctx.pay(self.claimant, self.reward)
        ctx.emit("RewardPaid", claimant=self.claimant, amount=self.reward)

    @contract_method
    def expire(self, ctx):
        if self.phase not in ("Open", "Claimed"):
            raise StateError(f"reward is {self.phase}")
        if ctx.height <= self.deadline:
            raise StateError(f"deadline {self.deadline} has not passed")
        self.phase = "Expired"
        ctx.pay(self.offeror, self.reward)
        ctx.emit("RewardExpired", offeror=self.offeror, amount=self.reward)
