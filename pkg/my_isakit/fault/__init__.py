# coding=utf-8
#
# fault 包
# 确定性故障注入活动：位翻转与固定型故障
#

from .campaign import (
    FaultCampaignReport,
    FaultRunResult,
    divergence_fraction,
    run_fault_campaign,
    save_campaign_report,
)
from .errors import FaultError, InvalidCampaign, InvalidLocation
from .inject import FaultInjector, apply_fault
from .spec import (
    CAMPAIGN_SCHEMA_VERSION,
    FaultCampaign,
    FaultSpec,
    campaign_from_json,
    generate_campaign,
    load_campaign,
    save_campaign,
)

__all__ = [
    "FaultCampaignReport",
    "FaultRunResult",
    "divergence_fraction",
    "run_fault_campaign",
    "save_campaign_report",
    "FaultError",
    "InvalidCampaign",
    "InvalidLocation",
    "FaultInjector",
    "apply_fault",
    "CAMPAIGN_SCHEMA_VERSION",
    "FaultCampaign",
    "FaultSpec",
    "campaign_from_json",
    "generate_campaign",
    "load_campaign",
    "save_campaign",
]
