"""CLI invocations with stored reports in tests/golden; run from tests/fixtures."""

CASES = {
    "embed_z4": ["embed", "--group", "z4.txt", "--normal", "(0 2)(1 3)"],
    "embed_a4_mod": ["embed", "--group", "a4.txt", "--normal", "(0 1)(2 3),(0 2)(1 3)", "--mod", "(0 1)(2 3)",
                     "--format", "machine"],
    "prop1_s3": ["prop1", "--group", "s3.txt", "--normal", "(0 1 2)"],
    "prop1_s3_planted": ["prop1", "--group", "s3.txt", "--normal", "(0 1 2)", "--mod", "(0 1 2)",
                         "--format", "machine"],
    "split_z2wrz3": ["split", "--group", "z2wrz3.txt", "--h", "4"],
    "split_q8": ["split", "--group", "q8.txt", "--h", "(0 1 3 6)(2 5 7 4)", "--format", "machine"],
    "blowup_z4": ["blowup", "--group", "z2.txt", "--top", "z4.txt", "--h", "(0 2)(1 3)"],
    "magnus_eval": ["magnus", "eval", "abaBAA"],
    "magnus_dij": ["magnus", "dij", "1", "0", "--format", "machine"],
    "magnus_independence": ["magnus", "independence", "--window", "3"],
    "magnus_hom": ["magnus", "hom-check", "--pairs", "1000", "--seed", "7", "--format", "machine"],
    "abelian_snf": ["abelian", "snf", "--matrix", "snf.txt"],
    "abelian_lemma_cb": ["abelian", "lemma-cb", "--matrix", "lemma_cb.txt"],
    "abelian_lemma_cc": ["abelian", "lemma-cc", "--group", "s3xz2.txt", "--a", "(0 1 2),(3 4)"],
    "fp_embed": ["fp", "embed", "--p", "2", "--s", "3,5", "--format", "machine"],
    "fp_fingerprint": ["fp", "fingerprint", "--p", "2", "--s", "3,5,7"],
    "fp_local": ["fp", "local-check", "--p", "2", "--s", "3,5", "--seed", "11", "--format", "machine"],
}

EXIT = {"prop1_s3_planted": 1, "split_q8": 1}
