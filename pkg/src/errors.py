"""Exception hierarchy shared by every sva-forge package.

Input problems also derive from ValueError so callers that only care about
"bad input" can catch that.
"""
from typing import Optional


class SvaForgeError(Exception):
    """Root of all sva-forge errors."""


class ConfigError(SvaForgeError, ValueError):
    """Bad configuration file, option or environment."""


# -=-=-=-=-=- RTL FRONTEND -=-=-=-=-=- #

class FrontendError(SvaForgeError, ValueError):
    pass


class NoModuleFound(FrontendError):
    pass


class MultipleModules(FrontendError):
    pass


class UnbalancedDelimiters(FrontendError):
    pass


class UnterminatedBlockComment(FrontendError):
    pass


class IncludeNotSupported(FrontendError):
    pass


class DuplicateDeclaration(FrontendError):
    pass


class MappingCollision(FrontendError):
    pass


class UnknownIdentifier(FrontendError):
    pass


# -=-=-=-=-=- RULEBOOK -=-=-=-=-=- #

class RuleSetError(SvaForgeError, ValueError):
    pass


class RuleParseError(RuleSetError):
    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class DuplicateRuleId(RuleSetError):
    pass


class UnknownLintKey(RuleSetError):
    pass


# -=-=-=-=-=- PROMPTER -=-=-=-=-=- #

class PromptError(SvaForgeError, ValueError):
    pass


class OverBudget(PromptError):
    GUIDANCE = "break down the RTL into smaller modules"

    def __init__(self, overflow: int, guidance: Optional[str] = None):
        self.overflow = overflow
        self.guidance = guidance or self.GUIDANCE
        super().__init__(f"prompt exceeds the input budget by {overflow} tokens; {self.guidance}")


class EmptyRuleSet(PromptError):
    pass


class EmptySpecification(PromptError):
    pass


class MalformedInterface(PromptError):
    pass


# -=-=-=-=-=- LLM GATEWAY -=-=-=-=-=- #

class GatewayError(SvaForgeError):
    retryable = False


class AuthError(GatewayError):
    pass


class RateLimited(GatewayError):
    retryable = True


class TransportError(GatewayError):
    retryable = True


class ContextOverflow(GatewayError):
    pass


class ScriptExhausted(GatewayError):
    pass


# -=-=-=-=-=- TESTBENCH FORGE -=-=-=-=-=- #

class ForgeError(SvaForgeError, ValueError):
    pass


class UnknownPort(ForgeError):
    pass


class MalformedAnnotation(ForgeError):
    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class LintErrorsPresent(ForgeError):
    def __init__(self, findings: list):
        self.findings = findings
        names = sorted({f.assertion for f in findings})
        super().__init__(f"{len(findings)} lint error(s) in: {', '.join(names)}")


class NoClockPort(ForgeError):
    pass


# -=-=-=-=-=- FPV BRIDGE -=-=-=-=-=- #

class BridgeError(SvaForgeError):
    pass


class EngineNotFound(BridgeError):
    pass


class SchemaError(BridgeError, ValueError):
    pass


class OutOfRange(BridgeError, ValueError):
    pass


class ZeroBase(BridgeError, ValueError):
    pass


# -=-=-=-=-=- LOOP ENGINE -=-=-=-=-=- #

class LoopError(SvaForgeError):
    pass


class CorruptLog(LoopError):
    pass
