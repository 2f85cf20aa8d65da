//! Reverse-mode automatic differentiation over dense f64 arrays.
//!
//! A [`Tensor`] is an immutable node in a dynamically built computation
//! graph. Every op records a backward closure that maps the node's
//! cotangent to contributions on its parents; [`Tensor::backward`] walks
//! the reachable graph in reverse creation order (a valid topological
//! order, since parents always precede children) and accumulates leaf
//! gradients. Graphs are rebuilt per forward pass, so rollout lengths and
//! Gaussian counts can change freely between iterations.
//!
//! Values are always double precision. Gradients accumulate across
//! repeated `backward` calls until [`Tensor::zero_grad`] resets them.

mod ops;

use crate::error::{Error, Result};
use crate::rng::Stream;
use alloc::boxed::Box;
use alloc::format;
use alloc::rc::Rc;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::sync::atomic::{AtomicU64, Ordering};

static NEXT_ID: AtomicU64 = AtomicU64::new(0);

pub(crate) type BackwardFn = Box<dyn Fn(&[f64])>;

struct Node {
    id: u64,
    shape: Vec<usize>,
    values: Vec<f64>,
    requires_grad: bool,
    grad: RefCell<Option<Vec<f64>>>,
    parents: Vec<Tensor>,
    backward: Option<BackwardFn>,
}

/// Dense multi-dimensional array with reverse-mode autodiff.
#[derive(Clone)]
pub struct Tensor {
    node: Rc<Node>,
}

impl core::fmt::Debug for Tensor {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Tensor")
            .field("id", &self.node.id)
            .field("shape", &self.node.shape)
            .field("requires_grad", &self.node.requires_grad)
            .finish()
    }
}

fn check_len(shape: &[usize], len: usize) -> Result<()> {
    let n: usize = shape.iter().product();
    if n != len {
        return Err(Error::Shape(format!(
            "shape {shape:?} implies {n} values, got {len}"
        )));
    }
    Ok(())
}

impl Tensor {
    fn new_node(
        shape: Vec<usize>,
        values: Vec<f64>,
        requires_grad: bool,
        parents: Vec<Tensor>,
        backward: Option<BackwardFn>,
    ) -> Tensor {
        Tensor {
            node: Rc::new(Node {
                id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
                shape,
                values,
                requires_grad,
                grad: RefCell::new(None),
                parents,
                backward,
            }),
        }
    }

    /// Constant (non-differentiable) tensor.
    pub fn from_vec(shape: &[usize], values: Vec<f64>) -> Result<Tensor> {
        check_len(shape, values.len())?;
        Ok(Tensor::new_node(shape.to_vec(), values, false, Vec::new(), None))
    }

    /// Trainable leaf: participates in `backward` and receives a gradient.
    pub fn param(shape: &[usize], values: Vec<f64>) -> Result<Tensor> {
        check_len(shape, values.len())?;
        Ok(Tensor::new_node(shape.to_vec(), values, true, Vec::new(), None))
    }

    /// Rank-0 constant.
    pub fn scalar(x: f64) -> Tensor {
        Tensor::new_node(Vec::new(), vec![x], false, Vec::new(), None)
    }

    pub fn zeros(shape: &[usize]) -> Tensor {
        let n = shape.iter().product();
        Tensor::new_node(shape.to_vec(), vec![0.0; n], false, Vec::new(), None)
    }

    pub fn full(shape: &[usize], c: f64) -> Tensor {
        let n = shape.iter().product();
        Tensor::new_node(shape.to_vec(), vec![c; n], false, Vec::new(), None)
    }

    /// Standard-normal constant draw from `rng`.
    pub fn randn(shape: &[usize], rng: &mut Stream) -> Tensor {
        let n: usize = shape.iter().product();
        let values = (0..n).map(|_| rng.normal()).collect();
        Tensor::new_node(shape.to_vec(), values, false, Vec::new(), None)
    }

    /// Internal op constructor. `requires_grad` is inherited from parents;
    /// the backward closure is dropped when no parent needs gradients.
    pub(crate) fn op(
        shape: Vec<usize>,
        values: Vec<f64>,
        parents: Vec<Tensor>,
        backward: BackwardFn,
    ) -> Tensor {
        let requires = parents.iter().any(|p| p.node.requires_grad);
        let backward = if requires { Some(backward) } else { None };
        Tensor::new_node(shape, values, requires, parents, backward)
    }

    pub fn shape(&self) -> &[usize] {
        &self.node.shape
    }

    pub fn rank(&self) -> usize {
        self.node.shape.len()
    }

    pub fn numel(&self) -> usize {
        self.node.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.node.values
    }

    pub fn requires_grad(&self) -> bool {
        self.node.requires_grad
    }

    /// Value of a single-element tensor.
    pub fn item(&self) -> Result<f64> {
        if self.numel() != 1 {
            return Err(Error::Shape(format!(
                "item() on tensor of shape {:?}",
                self.shape()
            )));
        }
        Ok(self.node.values[0])
    }

    /// Accumulated gradient, if any backward pass reached this node.
    pub fn grad(&self) -> Option<Vec<f64>> {
        self.node.grad.borrow().clone()
    }

    /// Gradient with absent treated as zero.
    pub fn grad_or_zeros(&self) -> Vec<f64> {
        self.node
            .grad
            .borrow()
            .clone()
            .unwrap_or_else(|| vec![0.0; self.numel()])
    }

    pub fn zero_grad(&self) {
        *self.node.grad.borrow_mut() = None;
    }

    pub(crate) fn accumulate_grad(&self, delta: &[f64]) {
        if !self.node.requires_grad {
            return;
        }
        let mut slot = self.node.grad.borrow_mut();
        match slot.as_mut() {
            Some(g) => {
                for (gi, di) in g.iter_mut().zip(delta) {
                    *gi += di;
                }
            }
            None => *slot = Some(delta.to_vec()),
        }
    }

    /// Reverse accumulation from a finite scalar.
    ///
    /// Non-leaf gradients along the reachable graph are cleared first, so
    /// each call contributes exactly one cotangent seed; leaf gradients
    /// accumulate across calls.
    pub fn backward(&self) -> Result<()> {
        if self.numel() != 1 {
            return Err(Error::Shape(format!(
                "backward() needs a scalar loss, got shape {:?}",
                self.shape()
            )));
        }
        if !self.node.values[0].is_finite() {
            return Err(Error::Domain(format!(
                "backward() on non-finite loss {}",
                self.node.values[0]
            )));
        }
        if !self.node.requires_grad {
            return Ok(());
        }

        // Reachable subgraph, iteratively to keep the stack flat.
        let mut order: Vec<Tensor> = Vec::new();
        let mut seen: Vec<u64> = Vec::new();
        let mut stack: Vec<Tensor> = vec![self.clone()];
        while let Some(t) = stack.pop() {
            if seen.binary_search(&t.node.id).is_ok() {
                continue;
            }
            let pos = seen.binary_search(&t.node.id).unwrap_err();
            seen.insert(pos, t.node.id);
            for p in &t.node.parents {
                if p.node.requires_grad {
                    stack.push(p.clone());
                }
            }
            order.push(t);
        }
        order.sort_by(|a, b| b.node.id.cmp(&a.node.id));

        for t in &order {
            if !t.node.parents.is_empty() {
                *t.node.grad.borrow_mut() = None;
            }
        }
        self.accumulate_grad(&[1.0]);

        for t in &order {
            if let Some(bw) = &t.node.backward {
                let g = t.node.grad.borrow();
                if let Some(g) = g.as_ref() {
                    bw(g);
                }
            }
        }
        Ok(())
    }
}

/// Central finite-difference check of `backward` against `f`.
///
/// Returns `max_i |g_ad[i] - g_fd[i]| / max(1, |g_fd[i]|)`. The closure is
/// re-evaluated per probe on constant inputs, so only the one AD pass pays
/// for gradient bookkeeping.
pub fn finite_diff_check<F>(f: F, x: &Tensor, eps: f64) -> Result<f64>
where
    F: Fn(&Tensor) -> Tensor,
{
    let leaf = Tensor::param(x.shape(), x.values().to_vec())?;
    let out = f(&leaf);
    out.backward()?;
    let g_ad = leaf.grad_or_zeros();

    let base = x.values().to_vec();
    let mut max_rel = 0.0f64;
    for i in 0..base.len() {
        let mut vp = base.clone();
        vp[i] += eps;
        let fp = f(&Tensor::from_vec(x.shape(), vp)?).item()?;
        let mut vm = base.clone();
        vm[i] -= eps;
        let fm = f(&Tensor::from_vec(x.shape(), vm)?).item()?;
        let g_fd = (fp - fm) / (2.0 * eps);
        let rel = libm::fabs(g_ad[i] - g_fd) / libm::fabs(g_fd).max(1.0);
        if rel > max_rel {
            max_rel = rel;
        }
    }
    Ok(max_rel)
}

/// Default probe step for [`finite_diff_check`].
pub const FD_EPS: f64 = 1e-5;
