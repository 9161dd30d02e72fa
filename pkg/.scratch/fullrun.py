import json, time
import numpy as np
from agcdetect.dataset import DatasetConfig, generate_dataset, split
from agcdetect.features import extract_matrix
from agcdetect.selection import fit_mask, apply_mask
from agcdetect import ml
from agcdetect.evaluation import confusion, metrics

t0 = time.time()
def log(msg):
    print(f"[{time.time()-t0:7.1f}s] {msg}", flush=True)

cfg = DatasetConfig()  # defaults: counts (200,700,700,800), seed 0
log(f"generating {sum(cfg.class_counts)} samples...")
ds = generate_dataset(cfg)
log(f"generated; redraws={ds.metadata.get('redraws')}")
tr, te = split(ds, 0.8, seed=cfg.seed)
log(f"split: train {len(tr.samples)}, test {len(te.samples)}")
mtr = extract_matrix(tr)
log("train features done")
mte = extract_matrix(te)
log("test features done")
np.save("/root/pkg/.scratch/Xtr.npy", mtr.values)
np.save("/root/pkg/.scratch/ytr.npy", mtr.labels)
np.save("/root/pkg/.scratch/Xte.npy", mte.values)
np.save("/root/pkg/.scratch/yte.npy", mte.labels)

mask = fit_mask(mtr, q=0.05)
log(f"selection kept {len(mask.kept_indices)} of 300")
str_, ste = apply_mask(mask, mtr), apply_mask(mask, mte)
np.save("/root/pkg/.scratch/kept.npy", np.array(mask.kept_indices))

results = {}
for tag in ("dt", "rf", "gnb", "knn", "svm", "gbt"):
    t1 = time.time()
    model = ml.train_classifier(tag, str_.values, str_.labels, seed=cfg.seed)
    ttrain = time.time() - t1
    pred = ml.predict(model, ste.values)
    rep = metrics(confusion(ste.labels, pred))
    results[tag] = {k: round(getattr(rep, k), 2) for k in
                    ("detected_fdias", "detected_no_attack",
                     "weighted_accuracy", "precision", "recall", "f1")}
    log(f"{tag}: train {ttrain:.1f}s  {results[tag]}")

with open("/root/pkg/.scratch/results.json", "w") as fh:
    json.dump(results, fh, indent=1)
log("done")
