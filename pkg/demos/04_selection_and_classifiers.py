"""
Feature selection and the classifier lineup
===========================================

On a small generated dataset: rank every feature by its Kruskal-Wallis
p-value, keep the ones surviving Benjamini-Hochberg at q = 0.05, then train
each classifier on the surviving columns and compare test metrics.
"""

from pathlib import Path

import numpy as np

from agcdetect.dataset import DatasetConfig, ScenarioRanges, generate_dataset, split
from agcdetect.evaluation import confusion, metrics
from agcdetect.features import extract_matrix
from agcdetect.ml import CLASSIFIER_TAGS, default_config, predict, train_classifier
from agcdetect.selection import apply_mask, fit_mask
from agcdetect.simulation import SimulationConfig

config = DatasetConfig(
    class_counts=(40, 30, 30, 30),
    seed=21,
    sim=SimulationConfig(dt=0.01, horizon=40.0, measurement_rate=10.0),
    # amplified attacks so the small sample still separates
    ranges=ScenarioRanges(additive_magnitude=(0.1, 0.3),
                          ramp_rate=(0.01, 0.04),
                          scale_factor=(0.8, 2.0),
                          attack_duration=(15.0, 25.0)),
)
data = generate_dataset(config)
train, test = split(data, train_fraction=0.8, seed=config.seed)
train_matrix = extract_matrix(train)
test_matrix = extract_matrix(test)

mask = fit_mask(train_matrix, q=0.05)
order = np.argsort(mask.p_values)
print(f"kept {len(mask.kept_indices)} of {len(mask.names)} features")
print("most discriminative:",
      ", ".join(mask.names[i] for i in order[:3]))
print("least discriminative:",
      ", ".join(mask.names[i] for i in order[-3:]))

tr = apply_mask(mask, train_matrix)
te = apply_mask(mask, test_matrix)

# Shrink the two expensive ensembles; everything else runs at defaults.
overrides = {"rf": default_config("rf").__class__(n_trees=50),
             "gbt": default_config("gbt").__class__(n_rounds=40)}
print(f"\n{'tag':5s} {'weighted':>9s} {'fdias':>7s} {'f1':>7s}")
for tag in CLASSIFIER_TAGS:
    model = train_classifier(tag, tr.values, tr.labels,
                             config=overrides.get(tag), seed=config.seed)
    report = metrics(confusion(te.labels, predict(model, te.values)))
    print(f"{tag:5s} {report.weighted_accuracy:9.2f} "
          f"{report.detected_fdias:7.2f} {report.f1:7.2f}")
