import pytest
import torch

ESM_VOCAB = [
    "<cls>", "<pad>", "<eos>", "<unk>",
    "L", "A", "G", "V", "S", "E", "R", "T", "I", "D", "P", "K", "Q", "N", "F", "Y",
    "M", "H", "W", "C", "X", "B", "U", "Z", "O", ".", "-",
    "<null_1>", "<mask>",
]


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory):
    """A small randomly initialized ESM-style encoder saved to a local path.

    Absolute position embeddings with a short context so the
    over-length skip path is testable.
    """
    from transformers import EsmConfig, EsmModel, EsmTokenizer

    out = tmp_path_factory.mktemp("model") / "tiny-esm"
    out.mkdir()
    vocab_file = out / "vocab.txt"
    vocab_file.write_text("\n".join(ESM_VOCAB) + "\n")
    tokenizer = EsmTokenizer(vocab_file=str(vocab_file))
    tokenizer.save_pretrained(out)

    torch.manual_seed(0)
    config = EsmConfig(
        vocab_size=33,
        mask_token_id=32,
        pad_token_id=1,
        hidden_size=24,
        num_hidden_layers=2,
        num_attention_heads=4,
        intermediate_size=48,
        max_position_embeddings=40,
        position_embedding_type="absolute",
        token_dropout=False,
    )
    model = EsmModel(config)
    model.eval()
    model.save_pretrained(out)
    return out


def write_table(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("id\tsequence\tfitness\n")
        for row in rows:
            fh.write("\t".join(str(v) for v in row) + "\n")
    return path
