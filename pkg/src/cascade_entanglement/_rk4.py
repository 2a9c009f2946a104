"""Classical fixed-step fourth-order Runge-Kutta for autonomous systems."""


def rk4_step(f, y, dt):
    """Advance ``y' = f(y)`` by one step of size ``dt``."""
    k1 = f(y)
    k2 = f(y + (0.5 * dt) * k1)
    k3 = f(y + (0.5 * dt) * k2)
    k4 = f(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
