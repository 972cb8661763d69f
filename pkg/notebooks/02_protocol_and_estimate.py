# coding: utf-8

# # From a design to a private survey
#
# Each respondent with true answer x reports a block. With probability
# theta the block is drawn uniformly from the r blocks containing x, and
# otherwise from the b - r blocks that miss it.

# In[1]:

from fractions import Fraction

from designldp.designs import catalog_lookup, classify
from designldp.estimators import CountVector, closed_form_estimator, estimate_from_counts
from designldp.protocol import build_tpm, params_from_gamma, params_from_theta, verify_ldp

s = catalog_lookup("pairs-4")
params = params_from_theta(classify(s), Fraction(3, 4))
print(params.to_dict())


# The transition matrix has two distinct entries. Their ratio is the
# privacy level e^eps.

# In[2]:

Q = build_tpm(s, params)
for row in Q.to_strings():
    print(row)
print("ratio:", verify_ldp(Q))


# Going the other way: ask for a ratio of 3 and get theta back.

# In[3]:

print(params_from_gamma(classify(s), 3).theta)


# Eighteen respondents produced these counts over the six blocks. The
# estimate is exact and unbiased (it can leave [0, 1] for small samples).

# In[4]:

counts = CountVector((4, 4, 2, 2, 3, 3), 18)
print(estimate_from_counts(s, params, counts))
print(closed_form_estimator(s, params).apply(counts.rho_hat))
