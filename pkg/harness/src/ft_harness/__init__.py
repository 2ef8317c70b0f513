"""Transformer fine-tuning harness for the security-sentence pipeline."""

from .harness import HarnessConfig, finetune_and_predict

__all__ = ["HarnessConfig", "finetune_and_predict"]
