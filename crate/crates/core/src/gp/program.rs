//! Expression-tree programs over feature terminals, ephemeral constants
//! and the arithmetic function set {+, -, *, protected /}.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Values are clamped here whenever an operation overflows to infinity.
const CLAMP: f64 = 1e12;
/// Divisors smaller than this trigger the protected-division convention.
const DIV_EPS: f64 = 1e-9;
/// Probability that a grown node is a function rather than a terminal.
const FUNCTION_PROB: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Add,
    Sub,
    Mul,
    Pdiv,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Add => "add",
            Func::Sub => "sub",
            Func::Mul => "mul",
            Func::Pdiv => "pdiv",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Func {
        op: Func,
        left: Box<Node>,
        right: Box<Node>,
    },
    Feature(usize),
    Const(f64),
}

impl Node {
    fn eval(&self, x: &[f64]) -> f64 {
        let v = match self {
            Node::Feature(i) => x[*i],
            Node::Const(c) => *c,
            Node::Func { op, left, right } => {
                let a = left.eval(x);
                let b = right.eval(x);
                match op {
                    Func::Add => a + b,
                    Func::Sub => a - b,
                    Func::Mul => a * b,
                    Func::Pdiv => {
                        if b.abs() > DIV_EPS {
                            a / b
                        } else {
                            1.0
                        }
                    }
                }
            }
        };
        if v.is_finite() {
            v
        } else if v.is_nan() {
            0.0
        } else if v > 0.0 {
            CLAMP
        } else {
            -CLAMP
        }
    }

    fn depth(&self) -> usize {
        match self {
            Node::Func { left, right, .. } => 1 + left.depth().max(right.depth()),
            _ => 1,
        }
    }

    fn count(&self) -> usize {
        match self {
            Node::Func { left, right, .. } => 1 + left.count() + right.count(),
            _ => 1,
        }
    }

    fn write_prefix(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Feature(i) => write!(f, "(feature {i})"),
            Node::Const(c) => write!(f, "(const {c})"),
            Node::Func { op, left, right } => {
                write!(f, "({} ", op.name())?;
                left.write_prefix(f)?;
                write!(f, " ")?;
                right.write_prefix(f)?;
                write!(f, ")")
            }
        }
    }
}

/// A real-valued hypothesis over length-D feature vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    root: Node,
}

impl Program {
    pub fn new(root: Node) -> Program {
        Program { root }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Recursive arithmetic evaluation. Total on finite inputs: division
    /// by a near-zero value yields 1.0 and non-finite intermediates clamp
    /// to +/-1e12, so the result is always finite.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.root.eval(x)
    }

    /// Tree depth; a lone terminal has depth 1.
    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// Node count.
    pub fn size(&self) -> usize {
        self.root.count()
    }

    /// Largest feature index referenced, if any.
    pub fn max_feature(&self) -> Option<usize> {
        fn walk(n: &Node) -> Option<usize> {
            match n {
                Node::Feature(i) => Some(*i),
                Node::Const(_) => None,
                Node::Func { left, right, .. } => match (walk(left), walk(right)) {
                    (Some(a), Some(b)) => Some(a.max(b)),
                    (a, b) => a.or(b),
                },
            }
        }
        walk(&self.root)
    }

    /// Preorder indices of function nodes.
    pub fn function_indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut idx = 0usize;
        fn walk(n: &Node, idx: &mut usize, out: &mut Vec<usize>) {
            if let Node::Func { left, right, .. } = n {
                out.push(*idx);
                *idx += 1;
                walk(left, idx, out);
                walk(right, idx, out);
            } else {
                *idx += 1;
            }
        }
        walk(&self.root, &mut idx, &mut out);
        out
    }

    /// Subtree rooted at the given preorder index.
    pub fn subtree(&self, index: usize) -> &Node {
        fn walk<'a>(n: &'a Node, idx: &mut usize, target: usize) -> Option<&'a Node> {
            if *idx == target {
                return Some(n);
            }
            *idx += 1;
            if let Node::Func { left, right, .. } = n {
                if let Some(hit) = walk(left, idx, target) {
                    return Some(hit);
                }
                return walk(right, idx, target);
            }
            None
        }
        let mut idx = 0;
        walk(&self.root, &mut idx, index).expect("node index out of range")
    }

    /// Depth (root = 1) at which the given preorder index sits.
    pub fn depth_of(&self, index: usize) -> usize {
        fn walk(n: &Node, idx: &mut usize, depth: usize, target: usize) -> Option<usize> {
            if *idx == target {
                return Some(depth);
            }
            *idx += 1;
            if let Node::Func { left, right, .. } = n {
                if let Some(hit) = walk(left, idx, depth + 1, target) {
                    return Some(hit);
                }
                return walk(right, idx, depth + 1, target);
            }
            None
        }
        let mut idx = 0;
        walk(&self.root, &mut idx, 1, index).expect("node index out of range")
    }

    /// Copy with the subtree at the given preorder index replaced.
    pub fn with_replaced(&self, index: usize, replacement: Node) -> Program {
        fn walk(n: &mut Node, idx: &mut usize, target: usize, replacement: &mut Option<Node>) {
            if *idx == target {
                *n = replacement.take().expect("replacement already used");
                return;
            }
            *idx += 1;
            if let Node::Func { left, right, .. } = n {
                walk(left, idx, target, replacement);
                if replacement.is_some() {
                    walk(right, idx, target, replacement);
                }
            }
        }
        let mut root = self.root.clone();
        let mut idx = 0;
        let mut slot = Some(replacement);
        walk(&mut root, &mut idx, index, &mut slot);
        assert!(slot.is_none(), "node index out of range");
        Program { root }
    }

    /// Parse the parenthesized prefix form produced by `Display`.
    pub fn parse(text: &str) -> Result<Program> {
        let mut tokens = tokenize(text);
        tokens.reverse();
        let root = parse_node(&mut tokens)?;
        if !tokens.is_empty() {
            return Err(Error::Model(format!(
                "trailing tokens after program: {:?}",
                tokens.last()
            )));
        }
        Ok(Program { root })
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.write_prefix(f)
    }
}

fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
                tokens.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    tokens
}

fn parse_node(tokens: &mut Vec<String>) -> Result<Node> {
    let open = tokens
        .pop()
        .ok_or_else(|| Error::Model("unexpected end of program text".into()))?;
    if open != "(" {
        return Err(Error::Model(format!("expected '(', found '{open}'")));
    }
    let head = tokens
        .pop()
        .ok_or_else(|| Error::Model("unexpected end of program text".into()))?;
    let node = match head.as_str() {
        "feature" => {
            let arg = expect_atom(tokens)?;
            let i: usize = arg
                .parse()
                .map_err(|_| Error::Model(format!("bad feature index '{arg}'")))?;
            Node::Feature(i)
        }
        "const" => {
            let arg = expect_atom(tokens)?;
            let v: f64 = arg
                .parse()
                .map_err(|_| Error::Model(format!("bad constant '{arg}'")))?;
            Node::Const(v)
        }
        "add" | "sub" | "mul" | "pdiv" => {
            let op = match head.as_str() {
                "add" => Func::Add,
                "sub" => Func::Sub,
                "mul" => Func::Mul,
                _ => Func::Pdiv,
            };
            let left = parse_node(tokens)?;
            let right = parse_node(tokens)?;
            Node::Func {
                op,
                left: Box::new(left),
                right: Box::new(right),
            }
        }
        other => return Err(Error::Model(format!("unknown node kind '{other}'"))),
    };
    let close = tokens
        .pop()
        .ok_or_else(|| Error::Model("unexpected end of program text".into()))?;
    if close != ")" {
        return Err(Error::Model(format!("expected ')', found '{close}'")));
    }
    Ok(node)
}

fn expect_atom(tokens: &mut Vec<String>) -> Result<String> {
    let t = tokens
        .pop()
        .ok_or_else(|| Error::Model("unexpected end of program text".into()))?;
    if t == "(" || t == ")" {
        return Err(Error::Model(format!("expected atom, found '{t}'")));
    }
    Ok(t)
}

/// Grow-method initialization: every node is a function with probability
/// 0.5 except at the depth limit, where terminals are forced. Terminals
/// split evenly between feature references and constants drawn from
/// U[-1, 1].
pub fn grow_tree(rng: &mut ChaCha8Rng, depth_limit: usize, feature_count: usize) -> Program {
    assert!(depth_limit >= 1, "depth_limit must be >= 1");
    assert!(feature_count >= 1, "feature_count must be >= 1");
    Program {
        root: grow_node(rng, 1, depth_limit, feature_count),
    }
}

fn grow_node(rng: &mut ChaCha8Rng, depth: usize, limit: usize, feature_count: usize) -> Node {
    if depth < limit && rng.random::<f64>() < FUNCTION_PROB {
        let op = match rng.random_range(0..4) {
            0 => Func::Add,
            1 => Func::Sub,
            2 => Func::Mul,
            _ => Func::Pdiv,
        };
        Node::Func {
            op,
            left: Box::new(grow_node(rng, depth + 1, limit, feature_count)),
            right: Box::new(grow_node(rng, depth + 1, limit, feature_count)),
        }
    } else if rng.random::<f64>() < 0.5 {
        Node::Feature(rng.random_range(0..feature_count))
    } else {
        Node::Const(rng.random_range(-1.0..=1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from;

    fn feat(i: usize) -> Node {
        Node::Feature(i)
    }

    fn func(op: Func, l: Node, r: Node) -> Node {
        Node::Func {
            op,
            left: Box::new(l),
            right: Box::new(r),
        }
    }

    #[test]
    fn eval_add_features() {
        let p = Program::new(func(Func::Add, feat(0), feat(1)));
        assert_eq!(p.eval(&[2.0, 3.0]), 5.0);
    }

    #[test]
    fn eval_protected_division() {
        let p = Program::new(func(Func::Pdiv, Node::Const(1.0), Node::Const(0.0)));
        assert_eq!(p.eval(&[]), 1.0);
    }

    #[test]
    fn eval_nested_arithmetic() {
        let p = Program::new(func(Func::Mul, func(Func::Sub, feat(0), feat(1)), feat(0)));
        assert_eq!(p.eval(&[3.0, 1.0]), 6.0);
    }

    #[test]
    fn eval_clamps_overflow() {
        // 1e300 * 1e300 overflows; the non-finite product clamps to 1e12.
        let p = Program::new(func(Func::Mul, Node::Const(1e300), Node::Const(1e300)));
        assert_eq!(p.eval(&[]), 1e12);
        let q = Program::new(func(Func::Mul, Node::Const(-1e300), Node::Const(1e300)));
        assert_eq!(q.eval(&[]), -1e12);
    }

    #[test]
    fn grow_depth_one_is_a_terminal() {
        let mut rng = rng_from(1);
        for _ in 0..50 {
            let p = grow_tree(&mut rng, 1, 3);
            assert_eq!(p.depth(), 1);
            assert_eq!(p.size(), 1);
        }
    }

    #[test]
    fn grow_respects_depth_limit() {
        let mut rng = rng_from(2);
        for _ in 0..1000 {
            let p = grow_tree(&mut rng, 6, 4);
            assert!(p.depth() <= 6);
        }
    }

    #[test]
    fn grow_single_feature_always_index_zero() {
        let mut rng = rng_from(3);
        for _ in 0..200 {
            let p = grow_tree(&mut rng, 5, 1);
            assert!(p.max_feature().unwrap_or(0) == 0);
        }
    }

    #[test]
    fn display_and_parse_round_trip() {
        let p = Program::new(func(
            Func::Add,
            feat(0),
            func(Func::Pdiv, Node::Const(0.25), feat(3)),
        ));
        let text = p.to_string();
        assert_eq!(text, "(add (feature 0) (pdiv (const 0.25) (feature 3)))");
        assert_eq!(Program::parse(&text).unwrap(), p);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(Program::parse("(nope 1 2)").is_err());
        assert!(Program::parse("(add (feature 0)").is_err());
        assert!(Program::parse("(feature 0) extra").is_err());
    }

    #[test]
    fn subtree_indexing_is_preorder() {
        // (add (feature 0) (mul (const 2) (feature 1)))
        //  0    1            2    3         4
        let p = Program::new(func(
            Func::Add,
            feat(0),
            func(Func::Mul, Node::Const(2.0), feat(1)),
        ));
        assert_eq!(p.size(), 5);
        assert!(matches!(p.subtree(0), Node::Func { op: Func::Add, .. }));
        assert!(matches!(p.subtree(1), Node::Feature(0)));
        assert!(matches!(p.subtree(2), Node::Func { op: Func::Mul, .. }));
        assert!(matches!(p.subtree(3), Node::Const(_)));
        assert!(matches!(p.subtree(4), Node::Feature(1)));
        assert_eq!(p.function_indices(), vec![0, 2]);
        assert_eq!(p.depth_of(0), 1);
        assert_eq!(p.depth_of(3), 3);
    }

    #[test]
    fn replace_swaps_exactly_one_subtree() {
        let p = Program::new(func(Func::Add, feat(0), feat(1)));
        let q = p.with_replaced(2, Node::Const(7.0));
        assert_eq!(q.eval(&[1.0, 100.0]), 8.0);
        assert_eq!(p.eval(&[1.0, 100.0]), 101.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn node_strategy() -> impl Strategy<Value = Node> {
            let leaf = prop_oneof![
                (0usize..6).prop_map(Node::Feature),
                prop_oneof![prop::num::f64::NORMAL, prop::num::f64::ZERO].prop_map(Node::Const),
            ];
            leaf.prop_recursive(6, 64, 2, |inner| {
                (0u8..4, inner.clone(), inner).prop_map(|(op, l, r)| Node::Func {
                    op: match op {
                        0 => Func::Add,
                        1 => Func::Sub,
                        2 => Func::Mul,
                        _ => Func::Pdiv,
                    },
                    left: Box::new(l),
                    right: Box::new(r),
                })
            })
        }

        proptest! {
            #[test]
            fn serialization_round_trips_exactly(root in node_strategy()) {
                let p = Program::new(root);
                let parsed = Program::parse(&p.to_string()).unwrap();
                prop_assert_eq!(parsed, p);
            }

            #[test]
            fn eval_is_total_and_finite(
                root in node_strategy(),
                x in prop::collection::vec(prop_oneof![prop::num::f64::NORMAL, prop::num::f64::ZERO], 6)
            ) {
                let p = Program::new(root);
                prop_assert!(p.eval(&x).is_finite());
            }
        }
    }
}
