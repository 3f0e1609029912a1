import pytest

from capillary_lab import Verdict


def test_verdict_members():
    """Test that the enum members are correctly instantiated."""
    assert Verdict.SPHERE_STABLE.value == "sphere_stable"
    assert Verdict.UNSTABLE_NON_UMBILIC.value == "unstable_non_umbilic"
    assert Verdict.HYPOTHESES_NOT_MET.value == "hypotheses_not_met"
    assert Verdict.DEGENERATE.value == "degenerate"


def test_verdict_str_method():
    """Test the __str__ method returns the correct string value."""
    assert str(Verdict.SPHERE_STABLE) == "sphere_stable"
    assert str(Verdict.DEGENERATE) == "degenerate"


def test_verdict_case_insensitive_lookup():
    """Test that the _missing_ method returns the member when case differs."""
    assert Verdict("SPHERE_STABLE") == Verdict.SPHERE_STABLE
    assert Verdict("Degenerate") == Verdict.DEGENERATE
    assert Verdict("hypotheses-not-met") == Verdict.HYPOTHESES_NOT_MET


def test_verdict_invalid_value():
    """Test that the _missing_ method raises ValueError for invalid values."""
    with pytest.raises(ValueError) as exc_info:
        Verdict("invalid_state")
    assert str(exc_info.value) == "No Verdict member with value 'invalid_state'"


@pytest.mark.parametrize(
    "verdict, code",
    [
        (Verdict.SPHERE_STABLE, 0),
        (Verdict.UNSTABLE_NON_UMBILIC, 0),
        (Verdict.DEGENERATE, 0),
        (Verdict.HYPOTHESES_NOT_MET, 2),
    ],
)
def test_verdict_exit_code(verdict, code):
    assert verdict.exit_code == code
