"""Published per-network mean AUC of CLE and eight baselines, transcribed
verbatim (18 networks x 9 indices)."""

INDICES = ["CLE", "SCF_CN", "SCF_AA", "SCF_RA", "SCF_CRA", "CN", "AA", "RA", "CRA"]

_ROWS = """
FWF  0.9103 0.8173 0.8172 0.8299 0.8480 0.6047 0.6009 0.6078 0.6367
FWE  0.9219 0.8457 0.8491 0.8609 0.8890 0.6758 0.6876 0.6923 0.7060
RAD  0.9412 0.9093 0.9109 0.9150 0.8866 0.9130 0.9128 0.9173 0.9170
DNC  0.8481 0.7899 0.7904 0.7922 0.7696 0.8004 0.7998 0.8054 0.7486
HFR  0.9520 0.9353 0.9445 0.9546 0.9096 0.8046 0.8073 0.8074 0.6520
HG   0.9503 0.9322 0.9340 0.9350 0.9038 0.9322 0.9318 0.9333 0.9250
WR   0.9737 0.9638 0.9652 0.9690 0.9543 0.9250 0.9283 0.9290 0.8714
PH   0.9008 0.9082 0.9069 0.9098 0.7695 0.8447 0.8409 0.8415 0.6584
MR   0.9428 0.9203 0.9205 0.9251 0.9216 0.9042 0.9038 0.9034 0.9061
BG   0.9398 0.9308 0.9340 0.9404 0.9234 0.9189 0.9210 0.9225 0.8960
GFA  0.8977 0.8505 0.8677 0.8832 0.8250 0.8482 0.8665 0.8707 0.7644
BM13 0.7210 0.6839 0.6836 0.6839 0.5384 0.5906 0.5923 0.5890 0.5155
FG   0.9062 0.8525 0.8576 0.8566 0.6972 0.5502 0.5538 0.5556 0.5101
FTB  0.8072 0.7492 0.7764 0.7740 0.7500 0.6498 0.6535 0.6311 0.6687
WTN  0.9260 0.8791 0.8845 0.8959 0.8367 0.8575 0.8762 0.8978 0.8906
UST  0.9438 0.9020 0.9113 0.9304 0.8794 0.9322 0.9471 0.9519 0.9191
ATC  0.7559 0.7154 0.7155 0.7184 0.5300 0.6112 0.6132 0.6091 0.5095
ER   0.5544 0.5514 0.5521 0.5540 0.5000 0.5260 0.5232 0.5244 0.5000
"""

PUBLISHED_R = {"CLE": 0.7778, "SCF_CN": 0.0, "SCF_AA": 0.0, "SCF_RA": 0.1667, "SCF_CRA": 0.0,
               "CN": 0.0, "AA": 0.0, "RA": 0.0556, "CRA": 0.0}


def auc_matrix():
    """``{index: {network: auc}}``."""
    out = {idx: {} for idx in INDICES}
    for line in _ROWS.strip().splitlines():
        net, *vals = line.split()
        for idx, v in zip(INDICES, vals):
            out[idx][net] = float(v)
    return out


_STATS = """
FWF  128  2106  0.259 32.91  0.33 1.77  -0.10 0.267
FWE  69   880   0.375 25.51  0.55 1.64  -0.27 0.195
RAD  167  3250  0.234 38.92  0.59 1.97  -0.30 0.086
DNC  2029 4384  0.002 4.32   0.22 3.37  -0.31 0.468
HFR  1858 12534 0.007 13.49  0.14 3.45  -0.09 0.283
HG   274  2124  0.057 15.50  0.63 2.42  -0.47 0.075
WR   6875 64712 0.003 18.83  0.30 3.49  -0.24 0.544
PH   241  923   0.068 7.66   0.22 2.59  -0.08 0.992
MR   1682 94834 0.067 112.76 0.36 2.16  -0.19 0.118
BG   1224 16715 0.022 27.31  0.32 2.74  -0.22 0.655
GFA  297  2148  0.046 14.04  0.29 2.45  -0.16 0.342
BM13 3391 4388  0.001 2.59   0.07 6.61  -0.02 0.895
FG   2239 6432  0.003 5.75   0.04 3.84  -0.33 0.910
FTB  35   118   0.193 6.74   0.27 2.13  -0.26 0.352
WTN  80   875   0.277 21.88  0.75 1.72  -0.39 0.184
UST  332  2126  0.039 12.81  0.62 2.74  -0.21 0.176
ATC  1266 2408  0.003 3.93   0.07 5.93  -0.02 0.723
ER   1174 1417  0.002 2.41   0.02 18.40 0.09  0.955
"""

STAT_KEYS = ["N", "M", "rho", "k", "c", "l", "sigma", "delta"]


def published_stats():
    """``{network: {N, M, rho, k, c, l, sigma, delta}}``."""
    out = {}
    for line in _STATS.strip().splitlines():
        net, *vals = line.split()
        out[net] = {k: (int(v) if k in ("N", "M") else float(v)) for k, v in zip(STAT_KEYS, vals)}
    return out


# FTB, CLE, 100 runs at a 10% test fraction
FTB_CLE_AUC = 0.8072
FTB_CLE_AUPR = 0.1555
# clustering of the degree-preserving randomization of HG
HG_REWIRED_CLUSTERING = 0.632
