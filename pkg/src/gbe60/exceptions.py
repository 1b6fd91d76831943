# -*- coding: utf-8 -*-
"""
Errors raised when a contract of the baseband chain is violated.
"""


class Gbe60Error(Exception):
    """Base class, the command line interface maps it to exit code 2."""


class ConfigurationError(Gbe60Error, ValueError):
    pass


class FrameSizeError(Gbe60Error, ValueError):
    pass


class LinkDomainError(Gbe60Error, ValueError):
    pass


class DecodeFailure(Gbe60Error):
    """
    A Reed-Solomon codeword held more errors than the decoder can correct.

    Parameters
    ----------
    message : str
        What went wrong.
    word_index : int, optional (default: None)
        Index of the codeword inside its frame, if known.
    """
    def __init__(self, message, word_index=None):
        if word_index is not None:
            message = f"word {word_index}: {message}"
        super(DecodeFailure, self).__init__(message)
        self.word_index = word_index


class FifoOverflowError(Gbe60Error):
    """
    A byte arrived at a full FIFO.

    Parameters
    ----------
    message : str
        What went wrong.
    event : dict
        The offending trace event (tick, event, occupancy).
    """
    def __init__(self, message, event):
        super(FifoOverflowError, self).__init__(f"{message}: {event}")
        self.event = event
