"""Fine-tune a pretrained transformer sentence classifier, emit predictions.

Thin by design: all evaluation lives in the main pipeline, which consumes
the predictions file this writes ({"sentence_id", "prob"} per line). The
pipeline is consumed only through its file formats (labels CSV, sentences
JSONL), never imported.
"""

from __future__ import annotations

import csv
import json
import random
import warnings
from dataclasses import dataclass
import numpy as np
import torch
from torch.utils.data import DataLoader, TensorDataset
from transformers import AutoModelForSequenceClassification, AutoTokenizer

# the search lattice used for tuning; other values work but warn
LATTICE = {
    "batch_size": (8, 16, 32),
    "epochs": (2, 3),
    "learning_rate": (1e-5, 2e-5, 3e-5),
}


@dataclass
class HarnessConfig:
    model_name: str
    batch_size: int = 16
    epochs: int = 2
    learning_rate: float = 2e-5
    max_len: int = 100
    seed: int = 42

    def __post_init__(self):
        if self.batch_size < 1 or self.epochs < 1 or self.learning_rate <= 0:
            raise ValueError("batch_size, epochs and learning_rate must be positive")
        if self.max_len < 8:
            raise ValueError("max_len too small")
        for field, allowed in LATTICE.items():
            if getattr(self, field) not in allowed:
                warnings.warn(
                    f"{field}={getattr(self, field)} is outside the usual "
                    f"search lattice {allowed}",
                    stacklevel=2,
                )


def read_labels_csv(path) -> dict[str, int]:
    labels: dict[str, int] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"id", "label"} <= set(reader.fieldnames):
            raise ValueError(f"labels file {path} must have id,label columns")
        for row in reader:
            label = int(row["label"])
            if label not in (0, 1):
                raise ValueError(f"label for id {row['id']} must be 0 or 1")
            labels[row["id"]] = label
    return labels


def read_sentences_jsonl(path) -> dict[str, str]:
    texts: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if "id" not in obj or "text" not in obj:
                raise ValueError(f"sentence file {path}:{lineno} lacks id/text")
            texts[str(obj["id"])] = str(obj["text"])
    return texts


def _seed_everything(seed: int) -> None:
    random.seed(seed)
    np.random.seed(seed)
    torch.manual_seed(seed)


def _encode(tokenizer, texts: list[str], max_len: int):
    # tokenizer inserts the special start/separator tokens; everything is
    # padded/truncated to a fixed length
    return tokenizer(
        texts,
        padding="max_length",
        truncation=True,
        max_length=max_len,
        return_tensors="pt",
    )


def finetune_and_predict(
    train_labels_path,
    train_sentences_path,
    eval_sentences_path,
    cfg: HarnessConfig,
    out_path,
) -> int:
    """Train on the labeled sentences, score the eval set, write predictions.

    Returns the number of predictions written. The output ids match the
    eval file's ids exactly, duplicate-free, probs in [0, 1].
    """
    labels = read_labels_csv(train_labels_path)
    train_texts = read_sentences_jsonl(train_sentences_path)
    eval_texts = read_sentences_jsonl(eval_sentences_path)

    missing = sorted(set(labels) - set(train_texts))
    if missing:
        raise ValueError(f"labeled ids missing from train sentences: {missing[:5]}")
    if len(set(labels.values())) < 2:
        raise ValueError("training set must contain both classes")

    _seed_everything(cfg.seed)
    tokenizer = AutoTokenizer.from_pretrained(cfg.model_name)
    model = AutoModelForSequenceClassification.from_pretrained(cfg.model_name, num_labels=2)
    device = torch.device("cuda" if torch.cuda.is_available() else "cpu")
    model.to(device)

    ids = sorted(labels)
    enc = _encode(tokenizer, [train_texts[i] for i in ids], cfg.max_len)
    dataset = TensorDataset(
        enc["input_ids"], enc["attention_mask"],
        torch.tensor([labels[i] for i in ids], dtype=torch.long),
    )
    generator = torch.Generator().manual_seed(cfg.seed)
    loader = DataLoader(dataset, batch_size=cfg.batch_size, shuffle=True, generator=generator)

    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)
    loss_fn = torch.nn.CrossEntropyLoss()
    model.train()
    for epoch in range(cfg.epochs):
        total = 0.0
        for input_ids, attention_mask, y in loader:
            optimizer.zero_grad()
            logits = model(
                input_ids=input_ids.to(device), attention_mask=attention_mask.to(device)
            ).logits
            loss = loss_fn(logits, y.to(device))
            loss.backward()
            optimizer.step()
            total += float(loss)
        print(f"epoch {epoch + 1}/{cfg.epochs}: mean loss {total / len(loader):.4f}")

    model.eval()
    eval_ids = sorted(eval_texts)
    written = 0
    with open(out_path, "w", encoding="utf-8", newline="") as fh, torch.no_grad():
        for start in range(0, len(eval_ids), cfg.batch_size):
            chunk = eval_ids[start : start + cfg.batch_size]
            enc = _encode(tokenizer, [eval_texts[i] for i in chunk], cfg.max_len)
            logits = model(
                input_ids=enc["input_ids"].to(device),
                attention_mask=enc["attention_mask"].to(device),
            ).logits
            probs = torch.softmax(logits, dim=-1)[:, 1].cpu().tolist()
            for sid, prob in zip(chunk, probs):
                fh.write(json.dumps({"sentence_id": sid, "prob": float(prob)}))
                fh.write("\n")
                written += 1
    return written
