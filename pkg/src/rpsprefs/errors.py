"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class RPSError(Exception):
    """Base class for all errors raised by :mod:`rpsprefs`."""


# -- lotteries and utilities ------------------------------------------------

class LotteryError(RPSError, ValueError):
    pass


class NegativeProbability(LotteryError):
    pass


class ProbabilitySumOutOfTolerance(LotteryError):
    pass


class EmptySupport(LotteryError):
    pass


class DomainViolation(RPSError, ValueError):
    """A payoff lies outside the domain of the utility function."""


# -- stimuli and preference functionals -------------------------------------

class ZeroTotalStimulus(RPSError, ZeroDivisionError):
    pass


class ZeroDenominator(ZeroTotalStimulus):
    """A term of the preference functional has a zero total stimulus."""


class NegativeStimulus(RPSError, ValueError):
    pass


class DegenerateChain(RPSError):
    """Both states of the choice chain are absorbing; no unique stationary law."""


class DegenerateChainWarning(RuntimeWarning):
    """One state of the choice chain is absorbing (chain is not ergodic)."""


# -- solvers -----------------------------------------------------------------

class SolverError(RPSError):
    pass


class NoSignChange(SolverError):
    pass


class NonConvergence(SolverError):
    pass


class MixedSignPayoffs(RPSError, ValueError):
    """Lottery has both gains and losses; the risk-attitude lemma does not apply."""


# -- command line ------------------------------------------------------------

class ConfigError(RPSError):
    pass


class UnknownCommand(ConfigError):
    pass


class BadSpecString(ConfigError, ValueError):
    pass


class MissingInput(ConfigError):
    pass
