// Field solver with one member per access section.
#include <AMReX_MultiFab.H>
#include <vector>

namespace demo {

class FieldSolver
{
public:
    explicit FieldSolver(int ncomp);
    void advance(amrex::MultiFab& state, amrex::Real dt);
    int steps = 0;

protected:
    amrex::Real cfl_ = 0.5;

private:
    std::vector<amrex::Real> history_;
};

FieldSolver::FieldSolver(int ncomp)
    : history_(ncomp)
{
    steps = 0;
}

void FieldSolver::advance(amrex::MultiFab& state, amrex::Real dt)
{
    for (amrex::MFIter mfi(state); mfi.isValid(); ++mfi) {
        auto const& a = state.array(mfi);
        const amrex::Box& bx = mfi.validbox();
        amrex::ParallelFor(bx, [=] AMREX_GPU_DEVICE (int i, int j, int k) {
            a(i,j,k) *= (1.0 - cfl_ * dt);
        });
    }
    history_.push_back(dt);
    ++steps;
}

}  // namespace demo
