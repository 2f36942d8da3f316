"""Point-mass reaching tasks on the square [-1, 1]^2."""

import numpy as np

from src.envs.base import GoalEnv, GoalEnvSpec
from src.numerics import Array

STEP_SCALE = 0.05
WALL_HALF_LENGTH = 0.8
WALL_MARGIN = 1e-3


def point_reach_spec(episode_len: int = 50, success_radius: float = 0.1) -> GoalEnvSpec:
    return GoalEnvSpec(
        state_dim=2,
        action_dim=2,
        goal_dim=2,
        action_low=-1.0,
        action_high=1.0,
        episode_len=episode_len,
        success_radius=success_radius,
    )


class PointReach2D(GoalEnv):
    """Point mass moving by ``0.05 * action`` inside [-1, 1]^2."""

    name = "point_reach"

    def __init__(self, episode_len: int = 50, success_radius: float = 0.1) -> None:
        super().__init__(point_reach_spec(episode_len, success_radius))

    def sample_goal(self, rng: np.random.Generator) -> Array:
        return rng.uniform(-1.0, 1.0, size=2)

    def goal_in_range(self, goal: Array) -> bool:
        return bool(np.all(np.isfinite(goal)) and np.all(np.abs(goal) <= 1.0))

    def goal_distance(self, state: Array, goal: Array) -> float:
        return float(np.linalg.norm(np.asarray(state)[:2] - goal))

    def _initial_state(self, rng: np.random.Generator) -> Array:
        return rng.uniform(-1.0, 1.0, size=2)

    def _transition(self, state: Array, action: Array, rng: np.random.Generator) -> Array:
        return np.clip(state + STEP_SCALE * action, -1.0, 1.0)


class PointReachWall2D(PointReach2D):
    """
    PointReach2D with a wall on x = 0, |y| <= 0.8.

    A move whose segment crosses the wall stops just short of it, so
    agents must detour through |y| > 0.8.
    """

    name = "point_reach_wall"

    @staticmethod
    def _in_wall(point: Array) -> bool:
        x_min, x_max, y_min, y_max = _wall_box()
        return bool(x_min < point[0] < x_max and y_min < point[1] < y_max)

    def _initial_state(self, rng: np.random.Generator) -> Array:
        while True:
            state = rng.uniform(-1.0, 1.0, size=2)
            if not self._in_wall(state):
                return state

    def _transition(self, state: Array, action: Array, rng: np.random.Generator) -> Array:
        target = np.clip(state + STEP_SCALE * action, -1.0, 1.0)
        return blocked_move(state, target)


def _wall_box() -> tuple[float, float, float, float]:
    half_y = WALL_HALF_LENGTH + WALL_MARGIN
    return -WALL_MARGIN, WALL_MARGIN, -half_y, half_y


def blocked_move(start: Array, target: Array) -> Array:
    """
    Truncate the straight move ``start -> target`` where it enters the wall.

    The wall is padded into a thin open box; the move stops at the first point
    of the box boundary (Liang-Barsky clipping), with the entered coordinate
    snapped exactly onto that face so the result never lies inside the box.
    Moves that miss the box or slide along its boundary return ``target``.
    """
    x_min, x_max, y_min, y_max = _wall_box()
    x0, y0 = float(start[0]), float(start[1])
    if x_min < x0 < x_max and y_min < y0 < y_max:
        return target
    dx, dy = float(target[0]) - x0, float(target[1]) - y0
    faces = (
        (-dx, x0 - x_min, 0, x_min),
        (dx, x_max - x0, 0, x_max),
        (-dy, y0 - y_min, 1, y_min),
        (dy, y_max - y0, 1, y_max),
    )
    enter, leave = 0.0, 1.0
    entered: tuple[int, float] | None = None
    for p, q, axis, bound in faces:
        if p == 0.0:
            if q <= 0.0:
                return target
            continue
        r = q / p
        if p < 0.0:
            if r >= enter:
                enter, entered = r, (axis, bound)
        else:
            leave = min(leave, r)
    if enter >= leave:
        return target
    stop = np.array([x0 + enter * dx, y0 + enter * dy])
    if entered is not None:
        axis, bound = entered
        stop[axis] = bound
    return stop
