from typing import Iterable, Tuple


class ExtremoError(Exception):
    """Base error. `exit_code` is what the command-line front end returns."""

    exit_code = 3

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class InputError(ExtremoError, ValueError):
    """Bad input files, flags or arguments (contract violations)."""

    exit_code = 2


class EstimationError(ExtremoError, ArithmeticError):
    """A numerical procedure cannot produce a value for the data it was given."""

    exit_code = 3


class OutsideSupportError(EstimationError):
    """Observations falling outside the fitted GEV support."""

    def __init__(self, cells: Iterable[Tuple[str, str]]):
        self.cells = list(cells)
        shown = ", ".join(f"(rep {rep}, site {site})" for rep, site in self.cells[:10])
        more = f" and {len(self.cells) - 10} more" if len(self.cells) > 10 else ""
        super().__init__(f"{len(self.cells)} observation(s) outside fitted support: {shown}{more}")
