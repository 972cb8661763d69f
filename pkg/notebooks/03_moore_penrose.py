# coding: utf-8

# # When is the simple estimator the pseudoinverse?
#
# For block designs with constant block size the closed-form left inverse
# coincides with the Moore-Penrose inverse of Q. With unequal block sizes
# both are left inverses, but they differ.

# In[1]:

from fractions import Fraction

from designldp.designs import catalog_lookup, classify
from designldp.estimators import closed_form_estimator, moore_penrose_generic, penrose_conditions
from designldp.protocol import build_tpm, params_from_theta

for name in ["pairs-4", "fano", "ag23", "fano-minus-point"]:
    s = catalog_lookup(name)
    params = params_from_theta(classify(s), Fraction(3, 4))
    Q = build_tpm(s, params)
    closed = closed_form_estimator(s, params)
    mp = moore_penrose_generic(Q)
    print(f"{name:18s} same={closed.L == mp.L}  penrose={all(penrose_conditions(Q, closed.L).values())}")


# The difference on the point-deleted Fano plane, entry by entry:

# In[2]:

s = catalog_lookup("fano-minus-point")
params = params_from_theta(classify(s), Fraction(3, 4))
Q = build_tpm(s, params)
delta = closed_form_estimator(s, params).L - moore_penrose_generic(Q).L
print(delta.to_numpy().round(4))
