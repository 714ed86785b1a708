void matmul(const double* a, const double* b, double* c, int n)
{
    for (int row = 0; row < n; ++row) {
        for (int col = 0; col < n; ++col) {
            double acc = 0.0;
            for (int inner = 0; inner < n; ++inner) {
                acc += a[row * n + inner] * b[inner * n + col];
            }
            c[row * n + col] = acc;
        }
    }
}
