"""Smoke-test fixtures: a tiny randomly initialized local transformer.

No hub access needed; the harness accepts any local model path.
"""

import json
import string
from pathlib import Path

import pytest
from transformers import BertConfig, BertForSequenceClassification, BertTokenizerFast


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory) -> Path:
    root = tmp_path_factory.mktemp("tiny_model")
    vocab = (
        ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
        + list(string.ascii_lowercase)
        + [f"##{c}" for c in string.ascii_lowercase]
        + ["the", "device", "password", "encrypt", "sensor", "loop", "secure",
           "board", "attack", "reads", "fails", "update"]
    )
    (root / "vocab.txt").write_text("\n".join(vocab))
    tokenizer = BertTokenizerFast(vocab_file=str(root / "vocab.txt"), do_lower_case=True)
    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=128,
        num_labels=2,
    )
    model = BertForSequenceClassification(config)
    model_dir = root / "model"
    model.save_pretrained(model_dir)
    tokenizer.save_pretrained(model_dir)
    return model_dir


@pytest.fixture
def smoke_dataset(tmp_path) -> dict:
    """50 sentences, half security-flavored, as the pipeline's file formats."""
    sentences = []
    labels = {}
    for i in range(50):
        sid = f"{i}-0"
        if i % 2 == 0:
            text = "the password must encrypt the secure device"
            labels[sid] = 1
        else:
            text = "the sensor loop reads the board update"
            labels[sid] = 0
        sentences.append({"id": sid, "post_id": i, "text": text,
                          "created_at": "2019-01-01T00:00:00+00:00",
                          "tags": ["iot"], "is_question": True})
    sent_path = tmp_path / "sentences.jsonl"
    with open(sent_path, "w") as fh:
        for s in sentences:
            fh.write(json.dumps(s) + "\n")
    labels_path = tmp_path / "labels.csv"
    with open(labels_path, "w") as fh:
        fh.write("id,label\n")
        for sid in sorted(labels):
            fh.write(f"{sid},{labels[sid]}\n")
    return {"sentences": sent_path, "labels": labels_path, "ids": sorted(labels)}
