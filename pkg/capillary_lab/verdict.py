from enum import Enum


class Verdict(Enum):
    """
    Outcome of the stability classification (case insensitive).

    Note: Be sure to cast to string or access the Enum.value.
    """

    SPHERE_STABLE = "sphere_stable"
    UNSTABLE_NON_UMBILIC = "unstable_non_umbilic"
    HYPOTHESES_NOT_MET = "hypotheses_not_met"
    DEGENERATE = "degenerate"

    def __str__(self) -> str:
        return self.value

    @property
    def exit_code(self) -> int:
        """Process exit status the command line reports for this verdict."""
        return 2 if self is Verdict.HYPOTHESES_NOT_MET else 0

    @classmethod
    def _missing_(cls, value):
        """Override this method to ignore case sensitivity"""
        value = str(value).lower().replace("-", "_")
        for member in cls:
            if member.name.lower() == value:
                return member
        raise ValueError(f"No {cls.__name__} member with value '{value}'")
