//! Monitor state types for the benchmark workloads.

/// Fixed-capacity ring buffer of integers.
#[derive(Debug)]
pub struct BufferState {
    items: Vec<i64>,
    put_ptr: usize,
    take_ptr: usize,
    pub item_count: usize,
    pub size: usize,
}

impl BufferState {
    pub fn new(size: usize) -> Self {
        BufferState {
            items: vec![0; size],
            put_ptr: 0,
            take_ptr: 0,
            item_count: 0,
            size,
        }
    }

    pub fn put(&mut self, v: i64) {
        debug_assert!(self.item_count < self.size);
        self.items[self.put_ptr] = v;
        self.put_ptr = (self.put_ptr + 1) % self.size;
        self.item_count += 1;
    }

    pub fn take(&mut self) -> i64 {
        debug_assert!(self.item_count > 0);
        let v = self.items[self.take_ptr];
        self.take_ptr = (self.take_ptr + 1) % self.size;
        self.item_count -= 1;
        v
    }

    pub fn fits(&self, n: usize) -> bool {
        self.item_count + n <= self.size
    }

    /// Contents in FIFO order.
    pub fn fifo_contents(&self) -> Vec<i64> {
        (0..self.item_count)
            .map(|i| self.items[(self.take_ptr + i) % self.size])
            .collect()
    }
}

struct ListNode {
    value: i64,
    next: Option<Box<ListNode>>,
}

/// Singly linked list of integers sorted non-decreasingly. Multiset
/// semantics: duplicate inserts keep both copies, removing an absent value
/// is a no-op. Operations walk the chain node by node; that walk is the
/// critical-section cost the list workload measures.
pub struct ListState {
    head: Option<Box<ListNode>>,
    len: usize,
}

impl ListState {
    pub fn new() -> Self {
        ListState { head: None, len: 0 }
    }

    /// Builds a list from values (sorted internally).
    pub fn from_values(mut values: Vec<i64>) -> Self {
        values.sort_unstable();
        let mut list = ListState::new();
        for v in values.into_iter().rev() {
            list.head = Some(Box::new(ListNode {
                value: v,
                next: list.head.take(),
            }));
            list.len += 1;
        }
        list
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn insert(&mut self, v: i64) {
        let mut cursor = &mut self.head;
        loop {
            match cursor {
                Some(node) if node.value < v => {
                    cursor = &mut cursor.as_mut().expect("just matched Some").next;
                }
                slot => {
                    let node = Box::new(ListNode {
                        value: v,
                        next: slot.take(),
                    });
                    let prev = node.next.as_ref().map(|n| n.value);
                    *slot = Some(node);
                    self.len += 1;
                    // Local sortedness: the new node sits before its successor.
                    debug_assert!(prev.is_none_or(|succ| v <= succ));
                    return;
                }
            }
        }
    }

    pub fn remove(&mut self, v: i64) -> bool {
        let mut cursor = &mut self.head;
        loop {
            match cursor {
                Some(node) if node.value < v => {
                    cursor = &mut cursor.as_mut().expect("just matched Some").next;
                }
                Some(node) if node.value == v => {
                    let next = node.next.take();
                    *cursor = next;
                    self.len -= 1;
                    return true;
                }
                _ => return false,
            }
        }
    }

    pub fn to_vec(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.len);
        let mut cursor = &self.head;
        while let Some(node) = cursor {
            out.push(node.value);
            cursor = &node.next;
        }
        out
    }

    pub fn is_sorted(&self) -> bool {
        self.to_vec().windows(2).all(|w| w[0] <= w[1])
    }
}

impl Default for ListState {
    fn default() -> Self {
        Self::new()
    }
}

impl Drop for ListState {
    fn drop(&mut self) {
        // Iterative teardown: recursive Box drops overflow the stack on
        // long chains.
        let mut cursor = self.head.take();
        while let Some(mut node) = cursor {
            cursor = node.next.take();
        }
    }
}

/// Round-robin turn counter.
#[derive(Debug)]
pub struct RRState {
    pub turn: i64,
    pub n_threads: i64,
}

impl RRState {
    pub fn new(n_threads: i64) -> Self {
        RRState { turn: 0, n_threads }
    }
}

/// Ticketed readers/writers counters.
#[derive(Debug, Default)]
pub struct TicketState {
    pub ticket: i64,
    pub serving: i64,
    pub rcnt: i64,
}
