from typing import Any


class RspinError(Exception):
    exit_code = 1


class PreconditionError(RspinError):
    """The caller asked for something outside an operation's domain."""

    exit_code = 1


class DegreeMismatchError(PreconditionError):
    pass


class UnstableError(PreconditionError):
    pass


class ForbiddenResidueError(PreconditionError):
    pass


class HypothesisError(PreconditionError):
    pass


class NotInvertibleError(PreconditionError):
    pass


class InvariantViolation(RspinError):
    """A mathematical identity that must hold failed. Always a bug."""

    exit_code = 2


class EdgeDivisibilityError(InvariantViolation):
    def __init__(
        self,
        message: str,
        graph: Any = None,
        edge: tuple[int, int] | None = None,
        remainder: dict[tuple[int, int], Any] | None = None,
    ) -> None:
        super().__init__(message)
        self.graph = graph
        self.edge = edge
        self.remainder = remainder

    def __str__(self) -> str:
        details = ""
        if self.graph is not None:
            details += f"\nGraph: {self.graph}"
        if self.edge is not None:
            details += f"\nEdge: {self.edge}"
        if self.remainder:
            shown = ", ".join(
                f"psi'^{i} psi''^{j}: {c}" for (i, j), c in sorted(self.remainder.items())
            )
            details += f"\nRemainder: {shown}"
        return f"{super().__str__()}{details}"


class PolynomialityError(InvariantViolation):
    def __init__(
        self, message: str, window: list[int] | None = None, r: int | None = None
    ) -> None:
        super().__init__(message)
        self.window = window
        self.r = r

    def __str__(self) -> str:
        details = ""
        if self.window:
            details += f"\nWindow: r = {self.window[0]}..{self.window[-1]}"
        if self.r is not None:
            details += f"\nMismatch at r = {self.r}"
        return f"{super().__str__()}{details}"


class VerificationFailed(InvariantViolation):
    pass
