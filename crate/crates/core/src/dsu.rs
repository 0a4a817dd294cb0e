/// Disjoint sets with path halving; representatives are canonicalised to
/// dense ids in order of the smallest member.
#[derive(Clone, Debug)]
pub struct Dsu {
    parent: Vec<u32>,
}

impl Dsu {
    pub fn new(n: usize) -> Dsu {
        Dsu { parent: (0..n as u32).collect() }
    }

    /// Adds a singleton and returns its id.
    pub fn push(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let g = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = g;
            x = g;
        }
        x
    }

    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        true
    }

    /// Dense labels for the members selected by `keep`; unselected members
    /// get `u32::MAX`. Returns labels and the number of classes.
    pub fn labels(&mut self, keep: impl Fn(u32) -> bool) -> (Vec<u32>, usize) {
        let n = self.parent.len();
        let mut label = vec![u32::MAX; n];
        let mut root_label = vec![u32::MAX; n];
        let mut count = 0;
        for x in 0..n as u32 {
            if !keep(x) {
                continue;
            }
            let r = self.find(x) as usize;
            if root_label[r] == u32::MAX {
                root_label[r] = count;
                count += 1;
            }
            label[x as usize] = root_label[r];
        }
        (label, count as usize)
    }
}
