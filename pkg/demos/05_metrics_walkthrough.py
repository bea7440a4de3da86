"""Detection metrics worked by hand on a ten-score example.

The detector rules a point ID when its score clears a threshold gamma
calibrated so that at least 95% of held-out ID scores pass. FPR95 is the
fraction of OOD scores that also pass; AUROC and AUPR summarize the
ranking without committing to a threshold.
"""
import numpy as np

from oodlab import aupr, auroc, calibrate_gamma, detect, fpr_at_tpr

id_scores = np.array([9.0, 8.0, 7.0, 6.0, 5.0])
ood_scores = np.array([6.0, 4.0, 3.0, 2.0, 1.0])
print("ID scores :", id_scores.tolist())
print("OOD scores:", ood_scores.tolist())

gamma = calibrate_gamma(id_scores, 0.95)
print()
print(f"gamma at 95% TPR = {gamma} (with 5 ID scores, all must pass, so the")
print("threshold is the smallest ID score)")
print("ID side  :", [detect(s, gamma) for s in id_scores])
print("OOD side :", [detect(s, gamma) for s in ood_scores])

fpr = fpr_at_tpr(id_scores, ood_scores, 0.95)
print()
print(f"FPR95 = {fpr} (exactly one OOD score, the 6.0, clears gamma=5)")

value = auroc(id_scores, ood_scores)
# by hand: 25 (id, ood) pairs; the single tie 6-vs-6 counts half
wins = sum((i > o) + 0.5 * (i == o) for i in id_scores for o in ood_scores)
print()
print(f"AUROC = {value} vs hand count {wins}/25 = {wins / 25}")

print(f"AUPR (ID positive) = {aupr(id_scores, ood_scores):.6f}")
print(f"constant scorer -> prevalence: "
      f"{aupr(np.zeros(30), np.zeros(70))} (30 ID of 100 total)")

print()
print("score shifts leave ranking metrics untouched:")
print(f"  auroc(+100 shift) = {auroc(id_scores + 100, ood_scores + 100)}")
