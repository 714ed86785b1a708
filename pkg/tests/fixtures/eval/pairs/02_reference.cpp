double sum(const std::vector<double>& values)
{
    double total = 0.0;
    for (std::size_t idx = 0; idx < values.size(); ++idx) {
        total += values[idx];
    }
    return total;
}
