# coding: utf-8

# # Variance, risk and the lower bound
#
# Several formulas give the total variance of the estimate. They should
# agree exactly, and none can fall below the bound over all unbiased linear
# estimators.

# In[1]:

from fractions import Fraction

import numpy as np

from designldp.designs import catalog_lookup, classify
from designldp.protocol import params_from_gamma, params_from_theta
from designldp.risk import Distribution, cn_trace_bound, risk_report

s = catalog_lookup("ag23")
params = params_from_theta(classify(s), Fraction(1, 2))
rep = risk_report(s, params, Distribution.uniform(9), t=10, estimator="mp")
for name, val in rep.routes.items():
    print(f"{name:20s} {val}")
print("lower bound:", rep.bound_cn, "tight:", rep.tight)


# On the 25-point design with blocks of size 4, a ratio of 21/4 makes the
# estimator meet the trace bound.

# In[2]:

big = catalog_lookup("bibd-25-4-1")
p = params_from_gamma(classify(big), Fraction(21, 4))
rep = risk_report(big, p, Distribution.uniform(25), t=1)
print(rep.information_trace, cn_trace_bound(25, 4, Fraction(21, 4)))


# How the variance falls as the privacy ratio grows, per design.

# In[3]:

gammas = [Fraction(g, 4) for g in range(5, 41, 5)]
for name in ["pairs-4", "fano", "ag23"]:
    d = catalog_lookup(name)
    row = []
    for g in gammas:
        pr = params_from_gamma(classify(d), g)
        row.append(float(risk_report(d, pr, Distribution.uniform(d.v), 1).total))
    print(f"{name:8s}", np.round(row, 3))
