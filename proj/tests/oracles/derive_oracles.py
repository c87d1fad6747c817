"""Independent derivation of the frozen reference values used by the C++ tests.

Plain numpy, no shared code with the library. Run: python3 derive_oracles.py
"""
import numpy as np

np.set_printoptions(precision=17)

FIDUCIALS = np.array([
    [-30, -30, -30], [30, -30, -30], [-30, 30, -30], [30, 30, 30], [-30, -30, 30],
    [30, -30, 30], [-30, 30, 30], [0, 0, 0], [15, -20, 25], [-25, 10, -15]], dtype=float)
TARGET = np.array([100.0, 0.0, 0.0])


def view(axis, sod=700.0, sdd=1000.0, pitch=0.2, w=2048, h=2048):
    fwd = np.asarray(axis, float) / np.linalg.norm(axis)
    down = np.array([0.0, 0.0, -1.0])
    right = np.cross(down, fwd)
    right /= np.linalg.norm(right)
    down = np.cross(fwd, right)
    r = np.vstack([right, down, fwd])
    c = -sod * fwd
    f = sdd / pitch
    k = np.array([[f, 0, w / 2], [0, f, h / 2], [0, 0, 1.0]])
    p = k @ np.hstack([r, (-r @ c)[:, None]])
    p = p / np.linalg.norm(p)
    cen = np.append(FIDUCIALS.mean(axis=0), 1.0)
    if p[2] @ cen < 0:
        p = -p
    return p


def rx(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[1, 0, 0, 0], [0, c, -s, 0], [0, s, c, 0], [0, 0, 0, 1.0]])


def ry(b):
    c, s = np.cos(b), np.sin(b)
    return np.array([[c, 0, s, 0], [0, 1, 0, 0], [-s, 0, c, 0], [0, 0, 0, 1.0]])


def rz(g):
    c, s = np.cos(g), np.sin(g)
    return np.array([[c, -s, 0, 0], [s, c, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1.0]])


def tt(d):
    m = np.eye(4)
    m[:3, 3] = d
    return m


def exact(a, b, g, d):
    return tt(d) @ rx(a) @ ry(b) @ rz(g)


def show(name, arr):
    print(name, ", ".join(repr(float(x)) for x in np.ravel(arr)))


A = view([0, 1, 0])
B = view([1, 0, 0])
show("A", A)
show("B", B)

q1 = np.append(FIDUCIALS[0], 1.0)
pa = A @ q1
u, v = pa[0] / pa[2], pa[1] / pa[2]
show("pixel_ap_fid1", [u, v])

x, y, z = FIDUCIALS[0]
show("design_row_u", [x, y, z, 1, 0, 0, 0, 0, -u * x, -u * y, -u * z, -u])
show("design_row_v", [0, 0, 0, 0, x, y, z, 1, -v * x, -v * y, -v * z, -v])

s = A[2] @ q1
show("ja_block_u", [A[0, 0] - A[2, 0] * u, A[0, 1] - A[2, 1] * u, A[0, 2] - A[2, 2] * u, -s, 0.0])
show("ja_block_v", [A[1, 0] - A[2, 0] * v, A[1, 1] - A[2, 1] * v, A[1, 2] - A[2, 2] * v, 0.0, -s])

qt = np.append(TARGET, 1.0)
p1 = A @ qt
p2 = B @ qt
u1, v1 = p1[:2] / p1[2]
u2, v2 = p2[:2] / p2[2]
n = np.vstack([u1 * A[2] - A[0], v1 * A[2] - A[1], u2 * B[2] - B[0], v2 * B[2] - B[1]])
show("n_matrix_target", n)

show("rot_x_1deg_point", (rx(np.radians(1.0)) @ np.array([10.0, 20.0, 30.0, 1.0]))[:3])

fid_rot = (rx(np.radians(1.0)) @ np.hstack([FIDUCIALS, np.ones((10, 1))]).T).T[:, :3]
show("fiducials_alpha_1deg", fid_rot)

# Full TCP chain at the L2 level: reference bias 2 deg about z + 5 mm along x,
# mount bias with the same magnitudes; default chain links.
l2_l1 = exact(0, 0, np.radians(90.0), [0, 0, 250.0])
tcp_l2 = exact(np.radians(180.0), 0, 0, [0, 0, 120.0])
mount = exact(0, 0, np.radians(2.0), [5.0, 0, 0])
q = np.append(TARGET, 1.0)
show("tcp_chain_l2", (tcp_l2 @ l2_l1 @ mount @ q)[:3])
