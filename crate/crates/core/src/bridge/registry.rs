use std::fmt;
use std::sync::{Arc, Weak};

use parking_lot::Mutex;

use super::value::HostValue;

#[derive(Debug, Default)]
struct Slots {
    free: Vec<usize>,
    allocated: usize,
    live: usize,
}

/// Slot table for host values that cross into Prolog as handles.
///
/// A slot stays taken while any [`HostHandle`] for it is alive, including
/// copies held inside terms, choice points and answers. It returns to the
/// free list when the last one is dropped.
#[derive(Debug, Clone, Default)]
pub struct HandleRegistry {
    slots: Arc<Mutex<Slots>>,
}

impl HandleRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&self, value: HostValue) -> HostHandle {
        let slot = {
            let mut s = self.slots.lock();
            s.live += 1;
            s.free.pop().unwrap_or_else(|| {
                s.allocated += 1;
                s.allocated - 1
            })
        };
        HostHandle(Arc::new(HandleCell {
            slot,
            value,
            registry: Arc::downgrade(&self.slots),
        }))
    }

    /// Handles currently alive.
    pub fn live(&self) -> usize {
        self.slots.lock().live
    }

    /// Distinct slots ever handed out (the high-water mark).
    pub fn allocated(&self) -> usize {
        self.slots.lock().allocated
    }
}

struct HandleCell {
    slot: usize,
    value: HostValue,
    registry: Weak<Mutex<Slots>>,
}

impl Drop for HandleCell {
    fn drop(&mut self) {
        if let Some(slots) = self.registry.upgrade() {
            let mut s = slots.lock();
            s.live -= 1;
            s.free.push(self.slot);
        }
    }
}

/// Reference to a registered host value. Clones share the slot; equality
/// is identity of the registration, not of the value.
#[derive(Clone)]
pub struct HostHandle(Arc<HandleCell>);

impl HostHandle {
    pub fn slot(&self) -> usize {
        self.0.slot
    }

    pub fn value(&self) -> &HostValue {
        &self.0.value
    }
}

impl PartialEq for HostHandle {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl Eq for HostHandle {}

impl fmt::Debug for HostHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HostHandle({})", self.0.slot)
    }
}
