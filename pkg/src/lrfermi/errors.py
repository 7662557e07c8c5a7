"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the domain where an operation is defined."""


class IntegrationError(RuntimeError):
    """A time integrator failed to reach the requested accuracy.

    Parameters
    ----------
    message : str
        Human readable description.
    diagnostics : dict, optional
        Refinement history or other data useful for debugging.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ConvergenceError(RuntimeError):
    """A fixed-point iteration did not converge.

    Parameters
    ----------
    message : str
        Human readable description.
    residuals : list of float, optional
        Residual history of the failed iteration.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = list(residuals or [])


class ConfigError(ValueError):
    """A scenario configuration document failed validation.

    Parameters
    ----------
    path : str
        Dotted location of the offending entry inside the document.
    message : str
        What is wrong with it.
    """

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class ScenarioError(RuntimeError):
    """A numerical failure while running one rung of a scenario.

    Parameters
    ----------
    message : str
    context : dict
        Scenario name, rung, variant and method of the failing run.
    """

    def __init__(self, message, context=None):
        super().__init__(message)
        self.context = dict(context or {})
