"""Dev script: run the desk-scale table grid and compare to published values."""
import json
import sys
import time

sys.path.insert(0, "src")

from tobitm import DgpConfig, child_seed, loss_from_spec, run_experiment

PAPER = {
    # (loss, family, n): (bias tuple, mse tuple, cp)
    ("clad", "normal_std", 100): ((0.0810, 0.0049, 0.0027, 0.1920), (0.1879, 0.0296, 0.5169, 0.5222), 0.31),
    ("clad", "laplace_std", 100): ((0.0736, 0.0073, -0.1701, 0.1852), (0.1786, 0.0277, 0.5676, 0.5972), 0.30),
    ("clad", "student_t3", 100): ((0.0957, 0.0058, -0.2062, 0.2212), (0.1987, 0.0353, 0.5455, 0.5658), 0.27),
    ("clad", "hetero_normal", 100): ((-0.1627, 0.1272, -0.0878, 0.3137), (1.7615, 0.6128, 4.3088, 4.3402), 0.39),
    ("wme", "normal_std", 100): ((0.0379, 0.0082, -0.1104, 0.1293), (0.3325, 0.0253, 1.2365, 1.2554), 0.35),
    ("wme", "laplace_std", 100): ((0.0266, 0.0111, -0.0978, 0.1114), (0.3187, 0.0369, 0.9666, 0.9796), 0.21),
    ("wme", "student_t3", 100): ((0.0135, 0.0054, -0.0889, 0.1171), (0.3838, 0.0383, 1.2553, 1.2894), 0.25),
    ("wme", "hetero_normal", 100): ((-1.1275, 0.3399, 0.6269, 0.0500), (20.079, 1.8527, 44.104, 41.828), 0.39),
    ("logcosh", "normal_std", 100): ((0.1054, -0.0135, -0.1607, 0.1327), (1.2096, 0.0196, 4.8477, 4.8370), 0.24),
    ("logcosh", "laplace_std", 100): ((0.1154, -0.0274, -0.1341, 0.0922), (0.2681, 0.0254, 0.9023, 0.8955), 0.33),
    ("logcosh", "student_t3", 100): ((0.0514, -0.0253, 0.0875, -0.1251), (9.9126, 0.0656, 26.956, 27.044), 0.36),
    ("logcosh", "hetero_normal", 100): ((-0.0934, 0.0462, -0.0720, 0.2349), (5.0210, 0.6100, 15.164, 15.246), 0.31),
    ("clad", "normal_std", 500): ((0.0070, 0.0014, 0.0014, 0.0206), (0.0272, 0.0054, 0.0723, 0.0745), 0.30),
    ("clad", "laplace_std", 500): ((0.0036, 0.0020, -0.0132, 0.0185), (0.0218, 0.0041, 0.0572, 0.0598), 0.31),
    ("clad", "student_t3", 500): ((0.0151, -0.0007, -0.0312, 0.0329), (0.0329, 0.0065, 0.0890, 0.0926), 0.27),
    ("clad", "hetero_normal", 500): ((-0.0300, 0.0362, -0.0145, 0.0545), (0.1583, 0.0759, 0.5081, 0.4822), 0.37),
    ("wme", "normal_std", 500): ((-0.0026, 0.0042, -0.0045, 0.0089), (0.0246, 0.0048, 0.0554, 0.0571), 0.26),
    ("wme", "laplace_std", 500): ((-0.0056, 0.0039, -0.0060, 0.0139), (0.0340, 0.0063, 0.0739, 0.0756), 0.30),
    ("wme", "student_t3", 500): ((-0.0016, 0.0030, -0.0115, 0.0151), (0.0374, 0.0067, 0.0856, 0.0881), 0.30),
    ("wme", "hetero_normal", 500): ((-0.1567, 0.0703, 0.0623, 0.0430), (0.5843, 0.1782, 1.1576, 1.0513), 0.39),
    ("logcosh", "normal_std", 500): ((0.0675, -0.0222, -0.0493, 0.0142), (0.0228, 0.0041, 0.0495, 0.0495), 0.29),
    ("logcosh", "laplace_std", 500): ((0.0773, -0.0227, -0.0545, 0.0103), (0.0270, 0.0053, 0.0586, 0.0571), 0.28),
    ("logcosh", "student_t3", 500): ((0.1325, -0.0199, -0.1821, 0.1428), (1.0520, 0.0298, 2.4272, 2.4430), 0.29),
    ("logcosh", "hetero_normal", 500): ((0.1349, -0.1007, -0.0568, 0.0117), (0.1680, 0.0775, 0.5177, 0.4699), 0.33),
    ("clad", "normal_std", 1000): ((-0.1738, -0.0190, -0.0071, 0.0084), (0.0137, 0.0027, 0.0347, 0.0358), 0.28),
    ("clad", "laplace_std", 1000): ((0.0015, -0.0002, -0.0069, 0.0076), (0.0092, 0.0019, 0.0233, 0.0240), 0.27),
    ("clad", "student_t3", 1000): ((0.0005, 0.0014, -0.0065, 0.0088), (0.0151, 0.0030, 0.0365, 0.0374), 0.31),
    ("clad", "hetero_normal", 1000): ((0.0042, 0.0114, -0.0376, 0.0533), (0.0591, 0.0333, 0.1904, 0.1714), 0.36),
    ("wme", "normal_std", 1000): ((-0.0024, 0.0006, 0.0002, 0.0067), (0.0122, 0.0022, 0.0280, 0.0288), 0.27),
    ("wme", "laplace_std", 1000): ((-0.0054, 0.0003, 0.0032, -0.0004), (0.0158, 0.0031, 0.0336, 0.0339), 0.29),
    ("wme", "student_t3", 1000): ((0.0011, -0.0020, -0.0003, 0.0004), (0.0175, 0.0032, 0.0369, 0.0381), 0.29),
    ("wme", "hetero_normal", 1000): ((-0.0744, 0.0298, 0.0320, 0.0183), (0.2252, 0.0746, 0.5140, 0.4585), 0.36),
    ("logcosh", "normal_std", 1000): ((0.0617, -0.0209, -0.0367, -0.0006), (0.0128, 0.0023, 0.0252, 0.0245), 0.27),
    ("logcosh", "laplace_std", 1000): ((0.0788, -0.0269, -0.0496, 0.0025), (0.0172, 0.0030, 0.0303, 0.0284), 0.31),
    ("logcosh", "student_t3", 1000): ((0.0861, -0.0281, -0.0599, 0.0122), (0.0315, 0.0062, 0.0709, 0.0688), 0.25),
    ("logcosh", "hetero_normal", 1000): ((0.1551, -0.1219, -0.0723, -0.0071), (0.0912, 0.0469, 0.2482, 0.2057), 0.36),
}

FAMS = ("normal_std", "laplace_std", "student_t3", "hetero_normal")
BASE_SEED = 20240901
R = 200

out = {}
t_start = time.time()
for spec in ("clad", "wme:d=1.35", "logcosh"):
    loss = loss_from_spec(spec)
    key_loss = spec.split(":")[0]
    for fi, fam in enumerate(FAMS):
        for n in (100, 500, 1000):
            t0 = time.time()
            cfg = DgpConfig(n=n, error_family=fam, seed=child_seed(BASE_SEED, fi, n))
            rep = run_experiment(cfg, loss, R, jobs=2)
            pb, pm, pcp = PAPER[(key_loss, fam, n)]
            rows = []
            for j in range(4):
                ratio = rep.mse[j] / pm[j]
                bias_bound = max(2 * abs(pb[j]), 0.08)
                ok_mse = 0.5 <= ratio <= 2.0
                ok_bias = abs(rep.bias[j]) <= bias_bound
                rows.append((j, rep.bias[j], pb[j], ok_bias, rep.mse[j], pm[j], ratio, ok_mse))
            out[f"{key_loss}|{fam}|{n}"] = dict(
                bias=[float(b) for b in rep.bias], mse=[float(m) for m in rep.mse],
                cp=rep.mean_censoring, fails=rep.failures, dt=time.time() - t0)
            flag = "".join("MX"[r[7]] for r in rows) + "/" + "".join("BX"[r[3]] for r in rows)
            print(f"{key_loss:8s} {fam:14s} n={n:5d} cp={rep.mean_censoring:.2f} "
                  f"mse_ratio={[round(r[6],2) for r in rows]} "
                  f"bias={[round(r[1],3) for r in rows]} fails={rep.failures} "
                  f"{'OK' if all(r[7] and r[3] for r in rows) else 'CHECK'} "
                  f"dt={time.time()-t0:.0f}s", flush=True)

print(f"TOTAL {time.time()-t_start:.0f}s")
json.dump(out, open("/tmp/grid_results.json", "w"), indent=1)
