"""Energy demand econometrics.

Unit-root tests with and without structural breaks, Johansen cointegration
with break regressors, and dynamic OLS long-run elasticities, driven by a
YAML analysis config and served read-only over HTTP.
"""

__version__ = "2026.10.18"
