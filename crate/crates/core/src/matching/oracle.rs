use super::Adjacency;

/// Query access to a bipartite adjacency relation. Every call to
/// [`EdgeOracle::query`] is counted, including repeats; callers that want to
/// avoid re-asking must cache answers themselves.
pub trait EdgeOracle {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn query(&mut self, i: usize, j: usize) -> bool;
    fn queries(&self) -> u64;
}

/// Oracle over a fully known matrix.
#[derive(Debug)]
pub struct MatrixOracle<'a> {
    adj: &'a Adjacency,
    count: u64,
}

impl<'a> MatrixOracle<'a> {
    pub fn new(adj: &'a Adjacency) -> Self {
        MatrixOracle { adj, count: 0 }
    }
}

impl EdgeOracle for MatrixOracle<'_> {
    fn rows(&self) -> usize {
        self.adj.rows()
    }

    fn cols(&self) -> usize {
        self.adj.cols()
    }

    fn query(&mut self, i: usize, j: usize) -> bool {
        self.count += 1;
        self.adj.get(i, j)
    }

    fn queries(&self) -> u64 {
        self.count
    }
}

/// Oracle backed by a closure, e.g. a recursive subtree-containment call.
pub struct FnOracle<F> {
    k: usize,
    l: usize,
    f: F,
    count: u64,
}

impl<F: FnMut(usize, usize) -> bool> FnOracle<F> {
    pub fn new(k: usize, l: usize, f: F) -> Self {
        FnOracle { k, l, f, count: 0 }
    }
}

impl<F: FnMut(usize, usize) -> bool> EdgeOracle for FnOracle<F> {
    fn rows(&self) -> usize {
        self.k
    }

    fn cols(&self) -> usize {
        self.l
    }

    fn query(&mut self, i: usize, j: usize) -> bool {
        self.count += 1;
        (self.f)(i, j)
    }

    fn queries(&self) -> u64 {
        self.count
    }
}

/// Views another oracle with rows and columns exchanged.
pub(crate) struct Transposed<'a, O: EdgeOracle + ?Sized>(pub &'a mut O);

impl<O: EdgeOracle + ?Sized> EdgeOracle for Transposed<'_, O> {
    fn rows(&self) -> usize {
        self.0.cols()
    }

    fn cols(&self) -> usize {
        self.0.rows()
    }

    fn query(&mut self, i: usize, j: usize) -> bool {
        self.0.query(j, i)
    }

    fn queries(&self) -> u64 {
        self.0.queries()
    }
}
