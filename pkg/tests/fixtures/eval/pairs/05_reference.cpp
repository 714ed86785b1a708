void laplacian(const amrex::MultiFab& phi, amrex::MultiFab& lap, const amrex::Geometry& geom)
{
    const auto dxinv = geom.InvCellSizeArray();
    for (amrex::MFIter mfi(lap); mfi.isValid(); ++mfi) {
        const amrex::Box& bx = mfi.validbox();
        auto const& p = phi.const_array(mfi);
        auto const& l = lap.array(mfi);
        amrex::ParallelFor(bx, [=] AMREX_GPU_DEVICE (int i, int j, int k) {
            l(i,j,k) = (p(i+1,j,k) - 2.0*p(i,j,k) + p(i-1,j,k)) * dxinv[0]*dxinv[0]
                     + (p(i,j+1,k) - 2.0*p(i,j,k) + p(i,j-1,k)) * dxinv[1]*dxinv[1]
                     + (p(i,j,k+1) - 2.0*p(i,j,k) + p(i,j,k-1)) * dxinv[2]*dxinv[2];
        });
    }
}
