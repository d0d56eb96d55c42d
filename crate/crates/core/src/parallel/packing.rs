use crate::error::{Error, Result};

pub const DEFAULT_BLOCK_SIZE: usize = 32;
pub const MAX_THREADS_PER_BLOCK: usize = 512;

/// Inputs of the chain-packing planner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PackingRequest {
    pub num_chains: usize,
    pub processor_count: usize,
    /// Threads per chain.
    pub block_size: usize,
    pub max_threads_per_block: usize,
    pub registers_available: usize,
    /// Registers one chain's thread group needs.
    pub registers_needed_per_chain_block: usize,
}

impl PackingRequest {
    pub fn new(num_chains: usize, processor_count: usize) -> Self {
        PackingRequest {
            num_chains,
            processor_count,
            block_size: DEFAULT_BLOCK_SIZE,
            max_threads_per_block: MAX_THREADS_PER_BLOCK,
            registers_available: 16_384,
            registers_needed_per_chain_block: 2_048,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PackingPlan {
    pub block_size: usize,
    pub packed_chains: usize,
    pub num_blocks: usize,
}

impl PackingPlan {
    /// Chains swept simultaneously when `processors` blocks run at once.
    pub fn parallel_chains(&self, processors: usize, num_chains: usize) -> usize {
        (self.num_blocks.min(processors) * self.packed_chains).min(num_chains)
    }

    pub fn threads_per_block(&self) -> usize {
        self.block_size * self.packed_chains
    }
}

fn blocks_for(num_chains: usize, packed: usize) -> usize {
    num_chains / packed + usize::from(!num_chains.is_multiple_of(packed))
}

/// Packs chains into processor blocks by doubling, stopping once processors
/// would go idle or the thread cap is reached, then halves while a block's
/// register demand exceeds the budget.
pub fn plan_packing(req: &PackingRequest) -> Result<PackingPlan> {
    let PackingRequest {
        num_chains,
        processor_count,
        block_size,
        max_threads_per_block,
        registers_available,
        registers_needed_per_chain_block,
    } = *req;
    if [
        num_chains,
        processor_count,
        block_size,
        max_threads_per_block,
        registers_available,
        registers_needed_per_chain_block,
    ]
    .contains(&0)
    {
        return Err(Error::InvalidArgument(
            "packing inputs must be positive".into(),
        ));
    }
    if block_size > max_threads_per_block {
        return Err(Error::Infeasible(format!(
            "block size {block_size} exceeds {max_threads_per_block} threads per block"
        )));
    }

    let mut packed = 1usize;
    let mut blocks = blocks_for(num_chains, packed);
    while packed * block_size < max_threads_per_block && blocks > processor_count {
        packed *= 2;
        blocks = blocks_for(num_chains, packed);
    }
    // a block size that is not a power of two can overshoot the thread cap
    while packed * block_size > max_threads_per_block {
        packed /= 2;
    }
    while packed * registers_needed_per_chain_block > registers_available && packed > 1 {
        packed /= 2;
    }
    if packed * registers_needed_per_chain_block > registers_available {
        return Err(Error::Infeasible(format!(
            "one chain needs {registers_needed_per_chain_block} registers, only {registers_available} available"
        )));
    }
    Ok(PackingPlan {
        block_size,
        packed_chains: packed,
        num_blocks: blocks_for(num_chains, packed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trace_111_chains_30_processors() {
        let plan = plan_packing(&PackingRequest::new(111, 30)).unwrap();
        assert_eq!(plan.packed_chains, 4);
        assert_eq!(plan.num_blocks, 28);
    }

    #[test]
    fn register_budget_limits_chains_per_processor() {
        let mut req = PackingRequest::new(240, 30);
        req.block_size = 64;
        req.registers_needed_per_chain_block = 2_048;
        req.registers_available = 8_192;
        let old = plan_packing(&req).unwrap();
        req.registers_available = 16_384;
        let new = plan_packing(&req).unwrap();
        assert_eq!((old.packed_chains, new.packed_chains), (4, 8));
        assert_eq!(old.parallel_chains(30, 240), 120);
        assert_eq!(new.parallel_chains(30, 240), 240);
    }

    #[test]
    fn single_chain() {
        let plan = plan_packing(&PackingRequest::new(1, 30)).unwrap();
        assert_eq!((plan.packed_chains, plan.num_blocks), (1, 1));
    }

    #[test]
    fn one_more_chain_can_halve_the_block_count() {
        // 30 chains fill 30 processors unpacked; the 31st forces doubling
        let a = plan_packing(&PackingRequest::new(30, 30)).unwrap();
        let b = plan_packing(&PackingRequest::new(31, 30)).unwrap();
        assert_eq!((a.packed_chains, a.num_blocks), (1, 30));
        assert_eq!((b.packed_chains, b.num_blocks), (2, 16));
    }

    #[test]
    fn infeasible_and_invalid() {
        let mut req = PackingRequest::new(10, 2);
        req.registers_needed_per_chain_block = 20_000;
        assert!(matches!(plan_packing(&req), Err(Error::Infeasible(_))));
        req = PackingRequest::new(10, 0);
        assert!(plan_packing(&req).is_err());
        req = PackingRequest::new(10, 2);
        req.block_size = 1024;
        assert!(matches!(plan_packing(&req), Err(Error::Infeasible(_))));
    }

    fn request() -> impl Strategy<Value = PackingRequest> {
        (
            1usize..500,
            1usize..64,
            1usize..=512,
            1usize..20_000,
            1usize..4_096,
        )
            .prop_map(|(chains, procs, block, regs, need)| PackingRequest {
                num_chains: chains,
                processor_count: procs,
                block_size: block,
                max_threads_per_block: 512,
                registers_available: regs.max(need),
                registers_needed_per_chain_block: need,
            })
    }

    proptest! {
        #[test]
        fn plans_respect_caps(req in request()) {
            let plan = plan_packing(&req).unwrap();
            prop_assert!(plan.threads_per_block() <= req.max_threads_per_block);
            prop_assert!(plan.packed_chains * req.registers_needed_per_chain_block <= req.registers_available);
            prop_assert_eq!(plan.num_blocks, req.num_chains.div_ceil(plan.packed_chains));
            prop_assert!(plan.packed_chains.is_power_of_two());
        }

        #[test]
        fn more_processors_never_pack_tighter(req in request(), extra in 1usize..64) {
            let base = plan_packing(&req).unwrap();
            let wider = plan_packing(&PackingRequest { processor_count: req.processor_count + extra, ..req }).unwrap();
            prop_assert!(wider.packed_chains <= base.packed_chains);
        }

        #[test]
        fn more_chains_never_pack_looser(req in request(), extra in 1usize..200) {
            let base = plan_packing(&req).unwrap();
            let bigger = plan_packing(&PackingRequest { num_chains: req.num_chains + extra, ..req }).unwrap();
            prop_assert!(bigger.packed_chains >= base.packed_chains);
            // at equal packing the block count follows the chain count
            if bigger.packed_chains == base.packed_chains {
                prop_assert!(bigger.num_blocks >= base.num_blocks);
            }
        }
    }
}
