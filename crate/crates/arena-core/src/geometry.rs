//! Planar geometry primitives shared by the simulator: vectors, angle
//! wrapping, obstacle shapes and ray/segment queries.

use serde::{Deserialize, Serialize};

pub const PI: f32 = std::f32::consts::PI;
pub const TAU: f32 = std::f32::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f32,
    pub y: f32,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f32, y: f32) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, o: Vec2) -> f32 {
        self.x * o.x + self.y * o.y
    }

    pub fn norm_sq(self) -> f32 {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(self) -> f32 {
        self.norm_sq().sqrt()
    }

    pub fn dist(self, o: Vec2) -> f32 {
        (self - o).norm()
    }

    /// Rotate counter-clockwise by `angle` radians.
    pub fn rotated(self, angle: f32) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2 {
            x: c * self.x - s * self.y,
            y: s * self.x + c * self.y,
        }
    }

    pub fn angle(self) -> f32 {
        self.y.atan2(self.x)
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        if n == 0.0 {
            Vec2::ZERO
        } else {
            self * (1.0 / n)
        }
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<f32> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f32) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl std::ops::Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Wrap an angle to the half-open interval (−π, π].
pub fn wrap_angle(a: f32) -> f32 {
    PI - (PI - a).rem_euclid(TAU)
}

/// Static arena obstacle: axis-aligned rectangle or circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Obstacle {
    Rect { center: Vec2, half: Vec2 },
    Circle { center: Vec2, radius: f32 },
}

impl Obstacle {
    pub fn area(&self) -> f32 {
        match *self {
            Obstacle::Rect { half, .. } => 4.0 * half.x * half.y,
            Obstacle::Circle { radius, .. } => PI * radius * radius,
        }
    }

    /// Signed distance from `p` to the obstacle boundary (negative inside).
    pub fn signed_distance(&self, p: Vec2) -> f32 {
        match *self {
            Obstacle::Circle { center, radius } => (p - center).norm() - radius,
            Obstacle::Rect { center, half } => {
                let d = Vec2::new((p.x - center.x).abs() - half.x, (p.y - center.y).abs() - half.y);
                let outside = Vec2::new(d.x.max(0.0), d.y.max(0.0)).norm();
                outside + d.x.max(d.y).min(0.0)
            }
        }
    }

    /// Closest point of the obstacle footprint to `p` (clamped to the boundary
    /// when `p` is outside; `p` itself when inside).
    pub fn closest_point(&self, p: Vec2) -> Vec2 {
        match *self {
            Obstacle::Circle { center, radius } => {
                let d = p - center;
                let n = d.norm();
                if n <= radius {
                    p
                } else {
                    center + d * (radius / n)
                }
            }
            Obstacle::Rect { center, half } => Vec2::new(
                p.x.clamp(center.x - half.x, center.x + half.x),
                p.y.clamp(center.y - half.y, center.y + half.y),
            ),
        }
    }

    pub fn overlaps(&self, other: &Obstacle) -> bool {
        match (*self, *other) {
            (Obstacle::Circle { center: c1, radius: r1 }, Obstacle::Circle { center: c2, radius: r2 }) => {
                (c1 - c2).norm() < r1 + r2
            }
            (Obstacle::Rect { center: c1, half: h1 }, Obstacle::Rect { center: c2, half: h2 }) => {
                (c1.x - c2.x).abs() < h1.x + h2.x && (c1.y - c2.y).abs() < h1.y + h2.y
            }
            (rect @ Obstacle::Rect { .. }, Obstacle::Circle { center, radius })
            | (Obstacle::Circle { center, radius }, rect @ Obstacle::Rect { .. }) => {
                rect.signed_distance(center) < radius
            }
        }
    }

    /// True when the whole footprint lies inside the square [0, side]^2.
    pub fn inside_arena(&self, side: f32) -> bool {
        match *self {
            Obstacle::Rect { center, half } => {
                center.x - half.x >= 0.0
                    && center.y - half.y >= 0.0
                    && center.x + half.x <= side
                    && center.y + half.y <= side
            }
            Obstacle::Circle { center, radius } => {
                center.x - radius >= 0.0
                    && center.y - radius >= 0.0
                    && center.x + radius <= side
                    && center.y + radius <= side
            }
        }
    }

    /// Smallest ray parameter t >= 0 with origin + t*dir on the boundary,
    /// or None when the ray misses. `dir` need not be unit length.
    pub fn ray_hit(&self, origin: Vec2, dir: Vec2) -> Option<f32> {
        match *self {
            Obstacle::Circle { center, radius } => ray_circle(origin, dir, center, radius),
            Obstacle::Rect { center, half } => ray_aabb(origin, dir, center, half),
        }
    }
}

/// Ray vs circle: smallest t >= 0, None on miss. Origins inside hit at t = 0.
pub fn ray_circle(origin: Vec2, dir: Vec2, center: Vec2, radius: f32) -> Option<f32> {
    let oc = origin - center;
    let a = dir.dot(dir);
    if a == 0.0 {
        return None;
    }
    let b = 2.0 * oc.dot(dir);
    let c = oc.dot(oc) - radius * radius;
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let t0 = (-b - sq) / (2.0 * a);
    let t1 = (-b + sq) / (2.0 * a);
    if t0 >= 0.0 {
        Some(t0)
    } else if t1 >= 0.0 {
        Some(0.0) // origin inside the circle
    } else {
        None
    }
}

/// Ray vs axis-aligned box via the slab method: smallest t >= 0, None on miss.
pub fn ray_aabb(origin: Vec2, dir: Vec2, center: Vec2, half: Vec2) -> Option<f32> {
    let mut tmin = f32::NEG_INFINITY;
    let mut tmax = f32::INFINITY;
    for axis in 0..2 {
        let (o, d, c, h) = if axis == 0 {
            (origin.x, dir.x, center.x, half.x)
        } else {
            (origin.y, dir.y, center.y, half.y)
        };
        if d == 0.0 {
            if (o - c).abs() > h {
                return None;
            }
        } else {
            let inv = 1.0 / d;
            let mut t0 = (c - h - o) * inv;
            let mut t1 = (c + h - o) * inv;
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            tmin = tmin.max(t0);
            tmax = tmax.min(t1);
            if tmin > tmax {
                return None;
            }
        }
    }
    if tmax < 0.0 {
        None
    } else {
        Some(tmin.max(0.0))
    }
}

/// Ray parameter at which a ray starting inside [0, side]^2 exits the square.
pub fn ray_arena_exit(origin: Vec2, dir: Vec2, side: f32) -> f32 {
    let mut t = f32::INFINITY;
    if dir.x > 0.0 {
        t = t.min((side - origin.x) / dir.x);
    } else if dir.x < 0.0 {
        t = t.min(-origin.x / dir.x);
    }
    if dir.y > 0.0 {
        t = t.min((side - origin.y) / dir.y);
    } else if dir.y < 0.0 {
        t = t.min(-origin.y / dir.y);
    }
    if t.is_finite() {
        t.max(0.0)
    } else {
        0.0
    }
}

/// Distance from point `p` to the segment [a, b].
pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f32 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}
