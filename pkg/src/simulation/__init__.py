# Circuit Environment and Angle Optimization
