"""Constants shared by the numba and numpy kernel backends."""

# Boundary condition codes used by the kernels.
BC_OPEN = 0      # out-of-window sites are permanently open (state 1)
BC_CLOSED = 1    # out-of-window sites are permanently closed (state 0)
BC_PERIODIC = 2  # coordinates wrap modulo the window dimensions

# splitmix64 constants; per-site randomness is the splitmix64 output stream
# indexed by a counter derived from the lattice coordinates.
GOLDEN = 0x9E3779B97F4A7C15
MIX_A = 0xBF58476D1CE4E5B9
MIX_B = 0x94D049BB133111EB
U53_INV = 1.0 / 9007199254740992.0  # 2**-53

# Observable menu for the exact enumeration kernel.
OBS_ONE = 0            # constant 1 (weights must sum to 1)
OBS_SITE_OPEN = 1      # site (p0,p1) open in the evolved configuration
OBS_CONNECTED = 2      # (p0,p1) and (p2,p3) share a cluster (target/adjacency)
OBS_CLUSTER_SIZE = 3   # cluster size at (p0,p1)
OBS_CROSS_STAR_V = 4   # open vertical *-crossing of the whole window
OBS_CROSS_Z2_H = 5     # closed horizontal Z2-crossing of the whole window
OBS_FLIP_AFTER = 6     # flip time of (p0,p1) finite and strictly > horizon
OBS_RING = 7           # (p0,p1) connected to the L-inf ring of radius p2
OBS_DETERMINED = 8     # fixed point at (p0,p1) equal under both halos
