"""
A small image database
======================

Reference images are hashed block by block and only their inverse digests
are kept. A query is hashed with the same key and scanned against every
entry. Brightness and contrast edits move pixels a long way in l1, so they
are caught only when the edit is mild.
"""

import numpy as np

from l1pph import store
from l1pph.imaging import Image, adjust, default_threshold, plan_blocks

rng = np.random.default_rng(3)
yy, xx = np.mgrid[0:32, 0:32]
images = []
for i in range(10):
    base = (xx * (2 + i) + yy * 5 + 17 * i) % 256
    images.append((f"ref{i}", Image.from_array(np.clip(base + rng.integers(-6, 7, base.shape), 0, 255))))

n = 32 * 32
t = default_threshold(256, n)
plan = plan_blocks(n, 8, t)
key = store.make_key(seed=5, plan=plan)
db = store.setup(key, plan, images)
print(f"{len(db)} entries, {plan.B} blocks of {plan.n_B} pixels, t_B = {plan.t_B}, p = {key.p}")

blob = store.save(db)
print(f"database file: {len(blob)} bytes")
db = store.load(blob)

ref = images[4][1]
queries = {
    "exact copy": ref,
    "brightness 1.0": adjust(ref, "brightness", 1.0),
    "brightness 1.02": adjust(ref, "brightness", 1.02),
    "brightness 1.5": adjust(ref, "brightness", 1.5),
    "contrast 0.99": adjust(ref, "contrast", 0.99),
    "contrast 0.5": adjust(ref, "contrast", 0.5),
    "random noise": Image.from_array(rng.integers(0, 256, (32, 32))),
}

for name, img in queries.items():
    rep = store.detect(db, store.prepare(key, plan, img))
    bits = "".join(map(str, rep.per_block_bits)) or "-"
    print(f"{name:16s} matched={rep.matched} id={rep.matched_id} blocks={bits} scanned={rep.scanned}")

# Requiring only some of the blocks tolerates local damage.
hurt = ref.vector().copy()
hurt[:128] = 255 - hurt[:128]
q = store.prepare(key, plan, hurt)
print("\none block destroyed, all blocks required :", store.detect(db, q).matched)
print("one block destroyed, 7 of 8 blocks enough:", store.detect(db, q, min_blocks=7 / 8).matched)
