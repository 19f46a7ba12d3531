"""Exceptions raised by ProgMon."""


class ProgmonError(Exception):
    """Base class for all ProgMon errors."""


class FormulaSyntaxError(ProgmonError, ValueError):
    def __init__(self, message: str, line: int, column: int, text: str = ""):
        self.line = line
        self.column = column
        self.text = text
        super().__init__(f"{message} at line {line}, column {column}")


class VariableCapExceeded(ProgmonError):
    def __init__(self, n: int, cap: int):
        self.n = n
        self.cap = cap
        super().__init__(f"formula has {n} variables, table cap is {cap}")


class UnknownVariable(ProgmonError, KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(name)

    def __str__(self):
        return f"unknown variable {self.name!r}"


class ModeMismatch(ProgmonError, ValueError):
    def __init__(self, expected, actual):
        self.expected = expected
        self.actual = actual
        super().__init__(f"weights were counted in {actual} mode, expected {expected}")


class NotAReducedTarget(ProgmonError, ValueError):
    def __init__(self, target: str, reason: str = "not a result of the reduced table"):
        self.target = target
        super().__init__(f"{target}: {reason}")


class UnsupportedExtension(NotAReducedTarget):
    """The target keeps exactly one representative of an equivalence class."""


class TargetNotInTable(ProgmonError, ValueError):
    def __init__(self, target: str):
        self.target = target
        super().__init__(f"no table row simplifies to {target}")


class IncompleteTopology(ProgmonError, ValueError):
    def __init__(self, missing):
        self.missing = sorted(missing)
        super().__init__(f"no process observes: {', '.join(self.missing)}")


class AlphabetMismatch(ProgmonError, ValueError):
    def __init__(self, process: str, expected, actual):
        self.process = process
        self.expected = sorted(expected)
        self.actual = sorted(actual)
        super().__init__(
            f"event for process {process!r} covers {self.actual}, alphabet is {self.expected}"
        )


class NotExpressible(ProgmonError, ValueError):
    def __init__(self, template: str, reason: str):
        self.template = template
        self.reason = reason
        super().__init__(f"{template}: {reason}")


class BenchRunFailed(ProgmonError):
    def __init__(self, pattern: str, seed: int, cause: Exception):
        self.pattern = pattern
        self.seed = seed
        self.cause = cause
        super().__init__(f"{pattern} run with seed {seed} failed: {cause}")
