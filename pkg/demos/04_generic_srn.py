"""Use the stochastic reward net engine directly, outside the server model.

The srn module is a small general-purpose GSPN/SRN solver: timed
transitions with optionally marking-dependent rates, immediate
transitions with weights and priorities, guard expressions over the
marking, vanishing-marking elimination, and a sparse steady-state solve.
Here we build an M/M/2/4 queue with a guarded repair mode and check the
solver against the textbook birth-death answer.
"""

import math

from patchdesign.guards import parse_guard
from patchdesign.srn import Net, expected_reward, solve

# -- M/M/2/4: Poisson arrivals, two parallel servers, buffer of 4 --------------
LAMBDA, MU, CAPACITY, SERVERS = 3.0, 2.0, 4, 2

net = Net()
net.add_place("P_free", CAPACITY)   # remaining buffer slots
net.add_place("P_jobs", 0)          # jobs in the system
# Arrivals only fire while a buffer slot is free (input arc enforces it).
net.add_timed("T_arrive", LAMBDA, inputs={"P_free": 1}, outputs={"P_jobs": 1})
# Service rate grows with queue length up to the number of servers:
# one token in P_jobs -> mu, two or more -> 2*mu.  Express that as a
# marking-dependent base rate capped by a guard pair.
net.add_timed("T_serve_1", MU, inputs={"P_jobs": 1}, outputs={"P_free": 1},
              guard=parse_guard("#P_jobs == 1"))
net.add_timed("T_serve_2", SERVERS * MU,
              inputs={"P_jobs": 1}, outputs={"P_free": 1},
              guard=parse_guard("#P_jobs >= 2"))

solution = solve(net)
print(f"{len(solution.states)} tangible states")

# Birth-death oracle for the same queue.
rho = [1.0]
for n in range(1, CAPACITY + 1):
    rho.append(rho[-1] * LAMBDA / (MU * min(n, SERVERS)))
total = sum(rho)
for n in range(CAPACITY + 1):
    p_srn = solution.probability(lambda m, n=n: m["P_jobs"] == n)
    p_ref = rho[n] / total
    print(f"P(N={n}): srn={p_srn:.8f} closed-form={p_ref:.8f}")
    assert math.isclose(p_srn, p_ref, rel_tol=1e-12)

mean_jobs = expected_reward(solution, lambda m: m["P_jobs"])
utilisation = expected_reward(
    solution, lambda m: min(m["P_jobs"], SERVERS) / SERVERS)
print(f"mean jobs in system = {mean_jobs:.6f}")
print(f"server utilisation  = {utilisation:.6f}")

# -- immediate transitions and vanishing markings -------------------------------
# A token arriving in P_hit is routed instantly by two weighted immediate
# transitions; the vanishing marking never appears in the solved chain.
router = Net()
router.add_place("P_src", 1)
router.add_place("P_hit", 0)
router.add_place("P_left", 0)
router.add_place("P_right", 0)
router.add_timed("T_go", 1.0, inputs={"P_src": 1}, outputs={"P_hit": 1})
router.add_immediate("T_left", inputs={"P_hit": 1}, outputs={"P_left": 1},
                     weight=1.0)
router.add_immediate("T_right", inputs={"P_hit": 1}, outputs={"P_right": 1},
                     weight=3.0)
router.add_timed("T_back_l", 2.0, inputs={"P_left": 1}, outputs={"P_src": 1})
router.add_timed("T_back_r", 2.0, inputs={"P_right": 1}, outputs={"P_src": 1})

sol = solve(router)
p_left = sol.probability(lambda m: m["P_left"] == 1)
p_right = sol.probability(lambda m: m["P_right"] == 1)
print(f"\nrouter: P(left)={p_left:.6f} P(right)={p_right:.6f} "
      f"(weights split 1:3 -> {p_right / p_left:.2f}x)")
