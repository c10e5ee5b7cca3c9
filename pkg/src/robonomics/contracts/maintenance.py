"""Vehicle maintenance escrow released on an oracle's service attestation.

Phases: Quoted -> Funded -> ProviderSignaled -> Confirmed | Refunded.
The vehicle opens the escrow with a quote (typically read from the oracle's
price attestation), funds it, and confirms once the oracle attests that the
obligations were met.  If the provider never finishes, the vehicle recovers
the funds once ``timeout`` blocks have passed since opening.
"""

from __future__ import annotations

from ..engine import Contract, as_address, as_amount, contract_method
from ..errors import BadAttestation, ConstructorError, StateError, WrongAmount
from ..oracle import Attestation, obligations_digest, service_subject, verify_attestation

TERMINAL = ("Confirmed", "Refunded")


class MaintenanceEscrow(Contract):
    kind = "maintenance_escrow"

    def __init__(self, ctx, provider, oracle, quote, obligations, timeout):
        self.vehicle = ctx.sender
        self.provider = as_address(provider, "provider", ConstructorError)
        self.oracle = as_address(oracle, "oracle", ConstructorError)
        if self.provider == self.vehicle:
            raise ConstructorError("provider must differ from the vehicle")
        self.quote = as_amount(quote, "quote", ConstructorError, positive=True)
        if not isinstance(obligations, str) or not obligations:
            raise ConstructorError("obligations must be a non-empty string")
        self.obligations = obligations_digest(obligations)
        as_amount(timeout, "timeout", ConstructorError, positive=True)
        self.timeout_height = ctx.height + timeout
        self.phase = "Quoted"
        ctx.emit("Quoted", vehicle=self.vehicle, provider=self.provider, quote=self.quote,
                 obligations=self.obligations)

    def state_json(self):
        return {
            "vehicle": self.vehicle,
            "provider": self.provider,
            "oracle": self.oracle,
            "quote": self.quote,
            "obligations": self.obligations,
            "phase": self.phase,
            "timeout_height": self.timeout_height,
        }

    @property
    def subject(self) -> str:
        return service_subject(self.vehicle, self.obligations)

    def _in(self, *phases):
        if self.phase not in phases:
            raise StateError(f"escrow is {self.phase}, expected {' or '.join(phases)}")

    @contract_method(payable=True)
    def fund(self, ctx):
        ctx.only(self.vehicle)
        self._in("Quoted")
        if ctx.amount != self.quote:
            raise WrongAmount(f"quote is {self.quote}, got {ctx.amount}")
        self.phase = "Funded"
        ctx.emit("Funded", vehicle=self.vehicle, amount=ctx.amount)

    @contract_method
    def signal_complete(self, ctx):
        ctx.only(self.provider)
        self._in("Funded")
        self.phase = "ProviderSignaled"
        ctx.emit("ServiceSignaled", provider=self.provider)

    @contract_method
    def confirm(self, ctx, sensor_attestation):
        ctx.only(self.vehicle)
        self._in("ProviderSignaled")
        try:
            att = Attestation.from_payload(sensor_attestation)
        except ValueError as exc:
            raise BadAttestation(str(exc)) from None
        ctx.step()
        if not verify_attestation(att, self.oracle):
            raise BadAttestation("attestation is not signed by the pinned oracle")
        if att.subject != self.subject:
            raise BadAttestation(f"attestation subject {att.subject!r} does not match obligations")
        if att.value is not True:
            raise BadAttestation("oracle does not report the service as complete")
        if att.height > ctx.height:
            raise BadAttestation("attestation is dated in the future")
        self.phase = "Confirmed"
        ctx.pay(self.provider, self.quote)
        ctx.emit("Released", provider=self.provider, amount=self.quote)

    @contract_method
    def refund_after_timeout(self, ctx):
        self._in("Funded", "ProviderSignaled")
        if ctx.height <= self.timeout_height:
            raise StateError(f"refund possible after height {self.timeout_height}")
        self.phase = "Refunded"
        ctx.pay(self.vehicle, self.quote)
        ctx.emit("Refunded", vehicle=self.vehicle, amount=self.quote)
