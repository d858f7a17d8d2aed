"""Exception types shared across the package."""


class PopweaveError(Exception):
    """Base class for all popweave failures."""


class BNFormatError(PopweaveError):
    """A network document is malformed or fails validation."""


class ScenarioError(PopweaveError):
    """A scenario configuration violates a structural contract."""


class CycleError(PopweaveError):
    """The parent relation contains a cycle."""

    def __init__(self, member: str):
        super().__init__(f"cycle detected involving variable '{member}'")
        self.member = member


class EvidenceError(PopweaveError):
    """Evidence references an unknown variable or label."""


class ImpossibleEvidenceError(PopweaveError):
    """Evidence has probability zero under the network.

    Kept distinct from other failures: the linker uses it to tell
    "no compatible peer exists" apart from plain misuse.
    """


class StateSpaceError(PopweaveError):
    """Joint enumeration would exceed the configured cap."""


class UnsatisfiableLinkTypeError(PopweaveError):
    """A matching network's link variable can never take the value 'yes'."""


class CapacityError(PopweaveError):
    """A degree-capacity attribute could not be turned into a count."""


class IntegrityError(PopweaveError):
    """A population is structurally inconsistent with its network."""
