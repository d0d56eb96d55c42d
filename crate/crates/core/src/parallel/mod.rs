//! Worker pool, hottest-first work distribution, chain packing and throttling.

mod packing;
mod pool;
mod throttle;

pub use packing::{
    plan_packing, PackingPlan, PackingRequest, DEFAULT_BLOCK_SIZE, MAX_THREADS_PER_BLOCK,
};
pub use pool::{
    build_work_pool, contiguous_makespan, list_schedule_makespan, Executor, WorkPool,
    WorkerPriority,
};
pub use throttle::{throttle, ThrottleConfig};
