use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnqueueOutcome {
    Accepted,
    DroppedTail,
}

/// FIFO that discards arrivals once `capacity` packets are waiting.
#[derive(Debug, Clone)]
pub struct DropTailQueue<P> {
    capacity: usize,
    items: VecDeque<P>,
}

impl<P> DropTailQueue<P> {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            items: VecDeque::with_capacity(capacity.min(1024)),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn enqueue(&mut self, pkt: P) -> EnqueueOutcome {
        match self.try_enqueue(pkt) {
            Ok(()) => EnqueueOutcome::Accepted,
            Err(_) => EnqueueOutcome::DroppedTail,
        }
    }

    pub fn try_enqueue(&mut self, pkt: P) -> Result<(), P> {
        if self.items.len() >= self.capacity {
            return Err(pkt);
        }
        self.items.push_back(pkt);
        Ok(())
    }

    pub fn dequeue(&mut self) -> Option<P> {
        self.items.pop_front()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn accepts_until_full() {
        let mut q = DropTailQueue::new(100);
        assert_eq!(q.enqueue(0), EnqueueOutcome::Accepted);
        for i in 1..100 {
            q.enqueue(i);
        }
        assert_eq!(q.len(), 100);
        assert_eq!(q.enqueue(100), EnqueueOutcome::DroppedTail);
        assert_eq!(q.len(), 100);
    }

    proptest! {
        #[test]
        fn occupancy_bounded_and_fifo(ops in proptest::collection::vec(any::<bool>(), 0..400), cap in 1usize..32) {
            let mut q = DropTailQueue::new(cap);
            let mut model: VecDeque<u32> = VecDeque::new();
            for (i, push) in ops.into_iter().enumerate() {
                if push {
                    let accepted = q.enqueue(i as u32) == EnqueueOutcome::Accepted;
                    prop_assert_eq!(accepted, model.len() < cap);
                    if accepted { model.push_back(i as u32); }
                } else {
                    prop_assert_eq!(q.dequeue(), model.pop_front());
                }
                prop_assert!(q.len() <= cap);
            }
        }
    }
}
