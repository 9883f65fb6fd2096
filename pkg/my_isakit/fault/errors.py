# coding=utf-8
#
# errors.py
# Fault injection errors
#


class FaultError(Exception):
    pass


class InvalidLocation(FaultError, ValueError):
    """The fault targets a register, flag, bit or address that does not exist."""


class InvalidCampaign(FaultError, ValueError):
    """A campaign document is malformed or does not fit the run budget."""
