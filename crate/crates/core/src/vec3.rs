//! Small fixed-size vector helpers over `[T; 3]`.

use crate::scalar::Scalar;

pub type Vec3<T> = [T; 3];

#[inline]
pub fn add<T: Scalar>(a: Vec3<T>, b: Vec3<T>) -> Vec3<T> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub<T: Scalar>(a: Vec3<T>, b: Vec3<T>) -> Vec3<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale<T: Scalar>(s: T, a: Vec3<T>) -> Vec3<T> {
    [s * a[0], s * a[1], s * a[2]]
}

#[inline]
pub fn dot<T: Scalar>(a: Vec3<T>, b: Vec3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross<T: Scalar>(a: Vec3<T>, b: Vec3<T>) -> Vec3<T> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm<T: Scalar>(a: Vec3<T>) -> T {
    dot(a, a).sqrt()
}

/// Unit vector along `a`; returns `None` for a zero (or non-finite) vector.
pub fn unit<T: Scalar>(a: Vec3<T>) -> Option<Vec3<T>> {
    let n = norm(a);
    if n > T::zero() && n.is_finite() {
        Some(scale(T::one() / n, a))
    } else {
        None
    }
}

/// `a·x + b·y + c·z` for basis vectors `x, y, z`.
#[inline]
pub fn combine<T: Scalar>(a: T, x: Vec3<T>, b: T, y: Vec3<T>, c: T, z: Vec3<T>) -> Vec3<T> {
    [
        a * x[0] + b * y[0] + c * z[0],
        a * x[1] + b * y[1] + c * z[1],
        a * x[2] + b * y[2] + c * z[2],
    ]
}
