// AI_METADATA
// example: MultiFab
// task_type: MULTIFAB_FILL_PARALLELFOR
// user_intent:
// 1) Fill the field data structure for amrex using a 
//    AMReX-style ParallelFor loop
// 2) Fill a multifab using ParallelFor
// 3) Populate the multifab with a parallelfor loop
// 4) For loop in amrex-style GPU-enabled way
// keywords: MFIter, ParallelFor, Array4, GPU, validbox
// inputs: MultiFab mf, dx
// outputs: mf data initialized

for(amrex::MFIter mfi(mf); mfi.isValid(); ++mfi){
    const amrex::Box& bx = mfi.validbox();
    const amrex::Array4<amrex::Real>& mf_array = mf.array(mfi);

    amrex::ParallelFor(bx, [=] AMREX_GPU_DEVICE(int i, int j, int k){

        amrex::Real x = (i+0.5) * dx[0];
        amrex::Real y = (j+0.5) * dx[1];
        amrex::Real z = (k+0.5) * dx[2];

        amrex::Real r_squared = ((x-0.5)*(x-0.5)+(y-0.5)*(y-0.5)+
                                (z-0.5)*(z-0.5))/0.01;

        mf_array(i,j,k) = 1.0 + std::exp(-r_squared);
    });
}

// AI_METADATA
// example: MultiFab
// task_type: MULTIFAB_SET_VALUE
// user_intent:
// 1) Set every cell of a multifab to a constant
// 2) Initialize all components to zero including ghost cells
// keywords: setVal, nGrow
// inputs: MultiFab mf, value
// outputs: mf holds value everywhere

mf.setVal(0.0, 0, mf.nComp(), mf.nGrow());

// AI_METADATA
// example: MultiFab
// task_type: MULTIFAB_TILED_LOOP
// user_intent:
// 1) Iterate over tiles of a multifab with OpenMP threading
// 2) Loop using tiling enabled MFIter and tilebox
// keywords: MFIter, TilingIfNotGPU, tilebox, OpenMP
// inputs: MultiFab phi
// outputs: phi scaled by two

#ifdef AMREX_USE_OMP
#pragma omp parallel if (amrex::Gpu::notInLaunchRegion())
#endif
for (amrex::MFIter mfi(phi, amrex::TilingIfNotGPU()); mfi.isValid(); ++mfi) {
    const amrex::Box& tbx = mfi.tilebox();
    auto const& a = phi.array(mfi);
    amrex::ParallelFor(tbx, [=] AMREX_GPU_DEVICE (int i, int j, int k) {
        a(i,j,k) *= 2.0;
    });
}
