// AI_METADATA
// example: MultiFab
// task_type: MULTIFAB_NORM
// user_intent:
// 1) Compute the maximum norm of a multifab component
// 2) Find the largest absolute value over valid cells
// keywords: norm0, max, reduction
// inputs: MultiFab mf, component
// outputs: Real maximum absolute value

amrex::Real vmax = mf.norm0(comp);

// AI_METADATA
// example: MultiFab
// task_type: MULTIFAB_SUM_REDUCE
// user_intent:
// 1) Sum all values of a multifab on the GPU with a reduction
// 2) Use ReduceOps and ReduceData to add up cell values
// keywords: ReduceOps, ReduceData, ReduceOpSum
// inputs: MultiFab mf
// outputs: Real total

amrex::ReduceOps<amrex::ReduceOpSum> reduce_op;
amrex::ReduceData<amrex::Real> reduce_data(reduce_op);
using ReduceTuple = typename decltype(reduce_data)::Type;
for (amrex::MFIter mfi(mf); mfi.isValid(); ++mfi) {
    const amrex::Box& bx = mfi.validbox();
    auto const& fab = mf.const_array(mfi);
    reduce_op.eval(bx, reduce_data,
        [=] AMREX_GPU_DEVICE (int i, int j, int k) -> ReduceTuple {
            return { fab(i,j,k) };
        });
}
amrex::Real total = amrex::get<0>(reduce_data.value());
amrex::ParallelDescriptor::ReduceRealSum(total);
