"""Exception hierarchy shared by all hypercen modules."""


class HypercenError(Exception):
    """Base class for domain errors (the CLI maps these to exit code 2)."""

    code = "DOMAIN"

    def fields(self):
        return {}


class PoleError(HypercenError):
    """The resolvent (I - beta*A)^-1 does not exist: beta sits on 1/lambda."""

    code = "POLE"

    def __init__(self, beta, lam, step=None):
        self.beta = float(beta)
        self.lam = float(lam)
        self.step = step
        msg = f"beta={self.beta!r} is a pole: 1/lambda with lambda={self.lam!r}"
        if step is not None:
            msg += f" (generation step {step})"
        super().__init__(msg)

    def fields(self):
        out = {"beta": repr(self.beta), "lambda": repr(self.lam)}
        if self.step is not None:
            out["step"] = str(self.step)
        return out


class SeriesDivergence(HypercenError):
    """Neumann series requested outside |beta| < 1/lambda_max."""

    code = "DIVERGENCE"

    def __init__(self, beta, lambda_max, reason=None):
        self.beta = float(beta)
        self.lambda_max = float(lambda_max)
        msg = reason or (
            f"series diverges: |beta|*lambda_max = "
            f"{abs(self.beta) * self.lambda_max:.6g} >= 1"
        )
        super().__init__(msg)

    def fields(self):
        return {"beta": repr(self.beta), "lambda": repr(self.lambda_max)}


class ZeroSpectrumError(HypercenError):
    code = "ZERO_SPECTRUM"


class HypergraphParseError(HypercenError):
    """Malformed hypergraph document; ``location`` names the offending field."""

    code = "PARSE"

    def __init__(self, message, location=None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)

    def fields(self):
        return {"location": str(self.location)} if self.location else {}


class MembershipError(HypercenError):
    """A learning update addressed a (node, edge) pair that is not incident."""

    code = "NOT_MEMBER"


class ConfigError(HypercenError):
    code = "CONFIG"
