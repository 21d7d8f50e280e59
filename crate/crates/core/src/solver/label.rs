use std::cmp::Ordering;

use crate::graph::NodeId;

pub(crate) const NO_PARENT: u32 = u32::MAX;

/// A partial path: accumulated log-risk and time at `node`, linked to the
/// label it was extended from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Label {
    pub f: f64,
    pub g_ell: f64,
    pub g_t: f64,
    pub node: NodeId,
    parent: u32,
}

impl Label {
    pub fn parent(&self) -> Option<LabelId> {
        (self.parent != NO_PARENT).then_some(LabelId(self.parent))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LabelId(pub(crate) u32);

/// Owns every label created during one search so parent links stay valid.
#[derive(Debug, Default)]
pub struct LabelArena {
    labels: Vec<Label>,
}

impl LabelArena {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, f: f64, g_ell: f64, g_t: f64, node: NodeId, parent: Option<LabelId>) -> LabelId {
        let id = u32::try_from(self.labels.len()).expect("label arena overflow");
        assert!(id != NO_PARENT, "label arena overflow");
        self.labels.push(Label { f, g_ell, g_t, node, parent: parent.map_or(NO_PARENT, |p| p.0) });
        LabelId(id)
    }

    #[inline]
    pub fn get(&self, id: LabelId) -> &Label {
        &self.labels[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Node sequence from the root label to `id`, in forward order.
    pub fn reconstruct_path(&self, id: LabelId) -> Vec<NodeId> {
        let mut path = Vec::new();
        let mut cur = Some(id);
        while let Some(c) = cur {
            let label = self.get(c);
            path.push(label.node);
            cur = label.parent();
        }
        path.reverse();
        path
    }
}

/// Heap entry ordered as a min-heap on `(f, g_ell, g_t, node)`, then
/// creation order.
#[derive(Debug, Clone, Copy)]
pub(crate) struct QueueEntry {
    pub f: f64,
    pub g_ell: f64,
    pub g_t: f64,
    pub node: u32,
    pub label: u32,
}

impl QueueEntry {
    pub fn new(label: &Label, id: LabelId) -> Self {
        QueueEntry { f: label.f, g_ell: label.g_ell, g_t: label.g_t, node: label.node.0, label: id.0 }
    }
}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.g_ell.total_cmp(&self.g_ell))
            .then_with(|| other.g_t.total_cmp(&self.g_t))
            .then_with(|| other.node.cmp(&self.node))
            .then_with(|| other.label.cmp(&self.label))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for QueueEntry {}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BinaryHeap;

    #[test]
    fn root_label_path() {
        let mut arena = LabelArena::new();
        let s = arena.push(1.0, 0.0, 0.0, NodeId(4), None);
        assert_eq!(arena.reconstruct_path(s), vec![NodeId(4)]);
        assert_eq!(arena.get(s).parent(), None);
    }

    #[test]
    fn chain_path() {
        let mut arena = LabelArena::new();
        let s = arena.push(1.0, 0.0, 0.0, NodeId(0), None);
        let a = arena.push(1.0, 0.5, 1.0, NodeId(1), Some(s));
        let _sibling = arena.push(2.0, 0.9, 1.0, NodeId(3), Some(s));
        let b = arena.push(1.0, 0.7, 2.0, NodeId(2), Some(a));
        assert_eq!(arena.reconstruct_path(b), vec![NodeId(0), NodeId(1), NodeId(2)]);
    }

    #[test]
    fn heap_pops_lexicographic_minimum() {
        let e = |f, g_ell, g_t, node, label| QueueEntry { f, g_ell, g_t, node, label };
        let mut heap = BinaryHeap::new();
        heap.push(e(1.0, 0.5, 3.0, 2, 0));
        heap.push(e(1.0, 0.5, 2.0, 9, 1));
        heap.push(e(0.5, 0.4, 9.0, 1, 2));
        heap.push(e(1.0, 0.2, 9.0, 1, 3));
        heap.push(e(1.0, 0.5, 2.0, 3, 4));
        let order: Vec<u32> = std::iter::from_fn(|| heap.pop().map(|x| x.label)).collect();
        assert_eq!(order, vec![2, 3, 4, 1, 0]);
    }
}
