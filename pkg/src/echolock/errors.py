class ConfigurationError(ValueError):
    """Invalid physical or numerical configuration."""


class ScenarioError(ConfigurationError):
    """Scenario text failed to parse or validate."""


class IntegrationError(RuntimeError):
    """Numerical propagation produced an invalid state."""
