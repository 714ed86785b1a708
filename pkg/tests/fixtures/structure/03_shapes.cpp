namespace geo {

class Shape {
public:
    virtual ~Shape() = default;
    virtual double area() const = 0;
protected:
    int sides_;
};

class Square : public Shape {
public:
    explicit Square(double s) : side_(s) {}
    double area() const override { return side_ * side_; }
private:
    double side_;
};

}  // namespace geo
