# coding: utf-8

# # Set systems, designs and their duals
#
# A report alphabet for the randomiser comes from a set system. Here we
# look at the built-in catalog, classify each entry and take a dual.

# In[1]:

from designldp import designs
from designldp.designs import catalog_lookup, classify, dual, incidence_matrix

for name in designs.catalog_names():
    print(name, classify(catalog_lookup(name)).to_dict())


# The affine plane of order 3 has 9 points and 12 lines of size 3. Every
# point is on 4 lines and every pair of points shares exactly one line.

# In[2]:

ag23 = catalog_lookup("ag23")
A = incidence_matrix(ag23).to_numpy().astype(int)
print(A)
print("column sums (r):", A.sum(axis=0))
print("pair counts (lambda):", set(int((A.T @ A)[i, j]) for i in range(9) for j in range(9) if i != j))


# Dropping a point from the Fano plane breaks constant block size but keeps
# constant replication and pair index, so it is still an (r, lambda)-design.

# In[3]:

fm = catalog_lookup("fano-minus-point")
print(classify(fm))
print("block sizes:", fm.block_sizes())


# The dual swaps points and blocks. Taking it twice gives the system back.

# In[4]:

d = dual(ag23)
print(d.v, d.b, classify(d).kind)
print(dual(d) == ag23)
