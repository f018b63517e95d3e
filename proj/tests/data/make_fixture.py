"""Regenerates the small synthetic fixture used by the CLI smoke tests."""
import numpy as np

rng = np.random.default_rng(20240611)
G, N = 300, 40
genes = [f"GENE{i:03d}" for i in range(G)]
samples = [f"S{j:02d}" for j in range(N)]
group = np.array([0] * 20 + [1] * 20)

f1 = rng.normal(size=N) + 1.5 * group
f2 = rng.normal(size=N)
logx = 5.0 + 0.5 * rng.normal(size=(G, N))
logx[0:30] += 1.0 * f1
logx[30:60] += 1.0 * f2
counts = np.maximum(np.round(2.0 ** logx - 1.0), 0).astype(int)

with open("fixture_expr.tsv", "w") as f:
    f.write("gene_id\t" + "\t".join(samples) + "\n")
    for g, row in zip(genes, counts):
        f.write(g + "\t" + "\t".join(str(v) for v in row) + "\n")

with open("fixture_labels.tsv", "w") as f:
    f.write("sample_id\tlabel\n")
    for s, gr in zip(samples, group):
        f.write(f"{s}\t{'B' if gr else 'A'}\n")

with open("fixture.gmt", "w") as f:
    f.write("MODULE_ONE\tplanted module one\t" + "\t".join(genes[0:30]) + "\n")
    f.write("MODULE_TWO\tplanted module two\t" + "\t".join(genes[30:60]) + "\n")
    for s in range(10):
        size = int(rng.integers(20, 41))
        members = rng.choice(genes[60:], size=size, replace=False)
        f.write(f"RANDOM_{s}\trandom genes\t" + "\t".join(sorted(members)) + "\n")
    f.write("TOO_SMALL\tdropped by the size window\t" + "\t".join(genes[100:105]) + "\n")
    f.write("MOSTLY_ABSENT\tmembers outside the universe\t" + "\t".join(
        genes[200:205] + [f"ABSENT{i}" for i in range(30)]) + "\n")

with open("fixture_targets.txt", "w") as f:
    f.write("# planted modules\nMODULE_ONE\nMODULE_TWO\n")
